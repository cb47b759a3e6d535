use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::monad::{sample_value, Monad};
use super::value::{Action, Value};
use crate::ast::Ty;

pub const LAWS: [&str; 7] = ["idl", "idr", "asc", "apl", "apr", "aplr", "map_map"];

#[derive(Clone, Debug, Serialize)]
pub struct LawResult {
    pub law: &'static str,
    pub passes: usize,
    pub failures: usize,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LawReport {
    pub v: u32,
    pub monad: Monad,
    pub trials: usize,
    pub seed: u64,
    pub laws: Vec<LawResult>,
}

impl LawReport {
    pub fn all_pass(&self) -> bool {
        self.laws.iter().all(|l| l.failures == 0)
    }
}

fn small_ty(rng: &mut ChaCha8Rng) -> Ty {
    match rng.gen_range(0..4) {
        0 => Ty::Unit,
        1 | 2 => Ty::Str,
        _ => Ty::prod(Ty::Str, Ty::Unit),
    }
}

fn kleisli(f: Value) -> Rc<dyn Fn(Value) -> Action> {
    Rc::new(move |v| f.apply(v).into_action())
}

fn fun(f: Value) -> Rc<dyn Fn(Value) -> Value> {
    Rc::new(move |v| f.apply(v))
}

/// Checks one law on freshly sampled arguments.
fn check(law: &str, m: Monad, rng: &mut ChaCha8Rng) -> (bool, String) {
    let (a, b, c) = (small_ty(rng), small_ty(rng), small_ty(rng));
    let desc = format!("A = {a}, B = {b}, C = {c}");
    let mut s = |t: &Ty| sample_value(t, rng, m);
    let ok = match law {
        "idl" => {
            let f = s(&Ty::arrow(a.clone(), Ty::eff(b.clone())));
            let x = s(&a);
            let lhs = m.bind(kleisli(f.clone()), m.pure(x.clone()));
            let rhs = f.apply(x).into_action();
            m.run_eq(&lhs, &rhs, &b)
        }
        "idr" => {
            let f = s(&Ty::arrow(a.clone(), b.clone()));
            let x = s(&Ty::eff(a)).into_action();
            let g = f.clone();
            let lhs = m.bind(Rc::new(move |v| m.pure(g.apply(v))), x.clone());
            let rhs = m.map(fun(f), x);
            m.run_eq(&lhs, &rhs, &b)
        }
        "asc" => {
            let f = s(&Ty::arrow(a.clone(), Ty::eff(b.clone())));
            let g = s(&Ty::arrow(b, Ty::eff(c.clone())));
            let x = s(&Ty::eff(a)).into_action();
            let lhs = m.bind(kleisli(g.clone()), m.bind(kleisli(f.clone()), x.clone()));
            let gk = kleisli(g);
            let rhs = m.bind(
                Rc::new(move |v| m.bind(gk.clone(), f.apply(v).into_action())),
                x,
            );
            m.run_eq(&lhs, &rhs, &c)
        }
        "apl" => {
            let f = s(&Ty::arrow(a.clone(), b.clone()));
            let x = s(&Ty::eff(a)).into_action();
            let lhs = m.ap(m.pure(f.clone()), x.clone());
            let rhs = m.map(fun(f), x);
            m.run_eq(&lhs, &rhs, &b)
        }
        "apr" => {
            let f = s(&Ty::eff(Ty::arrow(a.clone(), b.clone()))).into_action();
            let x = s(&a);
            let lhs = m.ap(f.clone(), m.pure(x.clone()));
            let rhs = m.map(Rc::new(move |g| g.apply(x.clone())), f);
            m.run_eq(&lhs, &rhs, &b)
        }
        "aplr" => {
            let f = s(&Ty::arrow(a.clone(), b.clone()));
            let x = s(&a);
            let lhs = m.map(fun(f.clone()), m.pure(x.clone()));
            let rhs = m.pure(f.apply(x));
            m.run_eq(&lhs, &rhs, &b)
        }
        "map_map" => {
            let g = s(&Ty::arrow(a.clone(), b.clone()));
            let f = s(&Ty::arrow(b, c.clone()));
            let x = s(&Ty::eff(a)).into_action();
            let lhs = m.map(fun(f.clone()), m.map(fun(g.clone()), x.clone()));
            let rhs = m.map(Rc::new(move |v| f.apply(g.apply(v))), x);
            m.run_eq(&lhs, &rhs, &c)
        }
        other => panic!("unknown law {other}"),
    };
    (ok, desc)
}

/// Checks the seven monad laws on `trials` random instances each.
pub fn check_laws(m: Monad, trials: usize, seed: u64) -> LawReport {
    let laws = LAWS
        .iter()
        .enumerate()
        .map(|(i, &law)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64 * 0x9e37_79b9));
            let mut r = LawResult {
                law,
                passes: 0,
                failures: 0,
                counterexample: None,
            };
            for t in 0..trials {
                let (ok, desc) = check(law, m, &mut rng);
                if ok {
                    r.passes += 1;
                } else {
                    r.failures += 1;
                    r.counterexample
                        .get_or_insert_with(|| format!("trial {t}: {desc}"));
                }
            }
            r
        })
        .collect();
    LawReport {
        v: 1,
        monad: m,
        trials,
        seed,
        laws,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_monads_are_lawful() {
        for m in Monad::ALL {
            let r = check_laws(m, 200, 7);
            assert!(r.all_pass(), "{m}: {:?}", r.laws);
        }
    }

    #[test]
    fn deterministic() {
        let a = serde_json::to_string(&check_laws(Monad::Trace, 50, 3)).unwrap();
        let b = serde_json::to_string(&check_laws(Monad::Trace, 50, 3)).unwrap();
        assert_eq!(a, b);
    }
}
