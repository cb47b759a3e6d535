//! Random well-typed terms and the executable property suites.
//!
//! | suite        | property checked on each generated term                         |
//! |--------------|-----------------------------------------------------------------|
//! | types        | translations of a source term check at `Eff t`                  |
//! | semantics    | the translation evaluates like the source term                  |
//! | span_work    | span and work do not grow; static and traced measures agree     |
//! | smart_ctors  | `AP`/`JOIN` agree with raw `Ap`/`Join` and are no more costly    |
//! | relabel      | relabeling a common term keeps its type and value               |
//! | effect_free  | common terms and their relabelings have span and work 0         |
//! | laws         | the seven monad laws                                            |
//! | normalize    | normalization keeps type and value, and does not add cost       |
//! | baseline     | the sequential baseline evaluates like the source term          |
//! | normal_form  | normalizing a translation leaves it unchanged (a conjecture)    |

mod gen;
mod shrink;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

pub use gen::{gen_term, GenConfig, GenError, Generator};
pub use shrink::shrink;

use crate::ast::{alpha_eq, is_effect_free, relabel, Kind, Label, Signature, Term, Ty};
use crate::metrics::{join_span, join_work, span, work};
use crate::normalize::normalize;
use crate::pretty::pretty;
use crate::semantics::{check_laws, eval, value_eq, ConstEnv, Monad};
use crate::translate::{naive_translate, seq_translate, smart_ap, smart_join, translate};
use crate::typing::{stamp, typecheck, TypeEnv};

pub const SUITES: [&str; 10] = [
    "types",
    "semantics",
    "span_work",
    "smart_ctors",
    "relabel",
    "effect_free",
    "laws",
    "normalize",
    "baseline",
    "normal_form",
];

/// At most this many failures are listed in a report; all are counted.
pub const MAX_LISTED_FAILURES: usize = 25;
/// Only the first few listed failures are shrunk.
const MAX_SHRUNK: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SuiteError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error(transparent)]
    Gen(#[from] GenError),
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub depth: usize,
    pub seed: u64,
    pub signature: Signature,
    /// Monads the semantic properties are checked in.
    pub monads: Vec<Monad>,
}

impl Default for SuiteConfig {
    fn default() -> SuiteConfig {
        SuiteConfig {
            depth: 5,
            seed: 0,
            signature: Signature::standard(),
            monads: Monad::BUILTIN.to_vec(),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Failure {
    pub seed: u64,
    pub term_pretty: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SuiteReport {
    pub v: u32,
    pub suite: String,
    pub trials: usize,
    pub passes: usize,
    pub failures: Vec<Failure>,
    pub seed: u64,
}

impl SuiteReport {
    pub fn failed(&self) -> usize {
        self.trials - self.passes
    }

    pub fn ok(&self) -> bool {
        self.passes == self.trials
    }
}

/// Seed of trial `i`, derived from the suite seed by a keyed stream.
pub fn sub_seed(seed: u64, i: u64) -> u64 {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(i);
    r.next_u64()
}

pub fn run_suite(name: &str, cfg: &SuiteConfig, trials: usize) -> Result<SuiteReport, SuiteError> {
    if !SUITES.contains(&name) {
        return Err(SuiteError::UnknownSuite(name.into()));
    }
    if name == "laws" {
        return Ok(run_laws(cfg, trials));
    }
    let cx = Context::new(cfg);
    let mut g = Generator::new(&cfg.signature);
    let mut report = SuiteReport {
        v: 1,
        suite: name.into(),
        trials,
        passes: 0,
        failures: vec![],
        seed: cfg.seed,
    };
    for i in 0..trials {
        let s = sub_seed(cfg.seed, i as u64);
        let term = generate(name, &mut g, cfg.depth, s)?;
        match cx.check(name, &term) {
            Ok(()) => report.passes += 1,
            Err(detail) => {
                if report.failures.len() < MAX_LISTED_FAILURES {
                    let (term, detail) = if report.failures.len() < MAX_SHRUNK {
                        let small = shrink(&term, subject_label(name), &cx.strict, |t| {
                            cx.check(name, t)
                        });
                        let detail = cx.check(name, &small).err().unwrap_or(detail);
                        (small, detail)
                    } else {
                        (term, detail)
                    };
                    report.failures.push(Failure {
                        seed: s,
                        term_pretty: pretty(&term),
                        detail,
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Regenerates the term a trial with sub-seed `seed` was run on.
pub fn replay(name: &str, cfg: &SuiteConfig, seed: u64) -> Result<Term, SuiteError> {
    if !SUITES.contains(&name) || name == "laws" {
        return Err(SuiteError::UnknownSuite(name.into()));
    }
    generate(name, &mut Generator::new(&cfg.signature), cfg.depth, seed)
}

fn run_laws(cfg: &SuiteConfig, trials: usize) -> SuiteReport {
    let mut report = SuiteReport {
        v: 1,
        suite: "laws".into(),
        trials: 0,
        passes: 0,
        failures: vec![],
        seed: cfg.seed,
    };
    for &m in &cfg.monads {
        let r = check_laws(m, trials, cfg.seed);
        for l in r.laws {
            report.trials += l.passes + l.failures;
            report.passes += l.passes;
            if let Some(c) = l.counterexample {
                report.failures.push(Failure {
                    seed: cfg.seed,
                    term_pretty: String::new(),
                    detail: format!("{m} violates {}: {c}", l.law),
                });
            }
        }
    }
    report
}

fn subject_label(name: &str) -> Label {
    match name {
        "relabel" | "effect_free" => Label::Com,
        "smart_ctors" | "normalize" => Label::Tgt,
        _ => Label::Src,
    }
}

fn generate(name: &str, g: &mut Generator, depth: usize, seed: u64) -> Result<Term, SuiteError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let label = subject_label(name);
    if name != "smart_ctors" {
        let ty = g.random_goal(label, &mut rng);
        return Ok(g.generate(label, &ty, depth, &mut rng)?);
    }
    // an argument tuple for AP or JOIN, packed as the raw node
    let arg = |g: &mut Generator, ty: Ty, rng: &mut ChaCha8Rng| -> Result<Term, GenError> {
        match (&ty, rng.gen_bool(0.5)) {
            (Ty::Eff(inner), true) => match g.generate(Label::Com, inner, depth - 1, rng) {
                Ok(c) => Ok(Term::pure(c).with_ty(ty.clone())),
                Err(_) => g.generate(Label::Tgt, &ty, depth, rng),
            },
            _ => g.generate(Label::Tgt, &ty, depth, rng),
        }
    };
    let b = match g.random_goal(Label::Src, &mut rng) {
        Ty::Eff(_) => Ty::Str,
        t => t,
    };
    if rng.gen_bool(0.5) {
        let a = if rng.gen_bool(0.5) { Ty::Str } else { Ty::Unit };
        let f = arg(g, Ty::eff(Ty::arrow(a.clone(), b.clone())), &mut rng)?;
        let e = arg(g, Ty::eff(a), &mut rng)?;
        Ok(Term::ap(f, e).with_ty(Ty::eff(b)))
    } else {
        let b = match arg(g, Ty::eff(Ty::eff(b.clone())), &mut rng) {
            Ok(x) => return Ok(Term::join(x).with_ty(Ty::eff(b))),
            Err(_) => Ty::Str,
        };
        let x = arg(g, Ty::eff(Ty::eff(b.clone())), &mut rng)?;
        Ok(Term::join(x).with_ty(Ty::eff(b)))
    }
}

struct Context {
    strict: TypeEnv,
    relaxed: TypeEnv,
    monads: Vec<(Monad, ConstEnv)>,
}

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn le(name: &str, got: u64, bound: u64) -> Check {
    ensure(got <= bound, || format!("{name} {got} exceeds {bound}"))
}

impl Context {
    fn new(cfg: &SuiteConfig) -> Context {
        let strict = TypeEnv::new(cfg.signature.clone());
        let relaxed = strict.clone().relaxed();
        let monads = cfg
            .monads
            .iter()
            .map(|&m| (m, ConstEnv::default_for(&cfg.signature, m)))
            .collect();
        Context {
            strict,
            relaxed,
            monads,
        }
    }

    fn check(&self, name: &str, e: &Term) -> Check {
        let Some(ty) = e.ty.clone() else {
            return Err("generated term carries no type".into());
        };
        match name {
            "types" => self.types(e, &ty),
            "semantics" => {
                self.same_meaning(e, Label::Src, &translate(e), Label::Tgt, &Ty::eff(ty))
            }
            "span_work" => self.span_work(e),
            "smart_ctors" => self.smart_ctors(e, &ty),
            "relabel" => {
                let r = relabel(e, Label::Tgt).map_err(|err| err.to_string())?;
                let t = typecheck(&r, Label::Tgt, &self.strict).map_err(|err| err.to_string())?;
                ensure(t == ty, || format!("relabeled term has type {t}, not {ty}"))?;
                self.same_meaning(&r, Label::Tgt, e, Label::Com, &ty)
            }
            "effect_free" => {
                ensure(is_effect_free(e), || {
                    "common term contains an effect".into()
                })?;
                let r = relabel(e, Label::Tgt).map_err(|err| err.to_string())?;
                for (what, t) in [("term", e), ("relabeled term", &r)] {
                    let m = (join_span(t), join_work(t));
                    ensure(m == (0, 0), || format!("{what} has span/work {m:?}"))?;
                }
                ensure((span(e), work(e)) == (0, 0), || {
                    "common term has cost".into()
                })
            }
            "normalize" => {
                let n = normalize(e).map_err(|err| err.to_string())?;
                let t = typecheck(&n, Label::Tgt, &self.relaxed)
                    .map_err(|err| format!("normal form ill-typed: {err}"))?;
                ensure(t == ty, || format!("normal form has type {t}, not {ty}"))?;
                self.same_meaning(&n, Label::Tgt, e, Label::Tgt, &ty)?;
                self.no_costlier(&n, e)
            }
            "baseline" => {
                let s = seq_translate(e);
                let t = typecheck(&s, Label::Tgt, &self.relaxed).map_err(|err| err.to_string())?;
                ensure(t == Ty::eff(ty.clone()), || {
                    format!("baseline has type {t}")
                })?;
                self.same_up_to_order(&s, e, &ty)
            }
            "normal_form" => {
                let p = translate(e);
                let n = normalize(&p).map_err(|err| err.to_string())?;
                ensure(alpha_eq(&n, &p), || format!("rewritten to {}", pretty(&n)))
            }
            other => Err(format!("no property for suite `{other}`")),
        }
    }

    fn types(&self, e: &Term, ty: &Ty) -> Check {
        let want = Ty::eff(ty.clone());
        let src = typecheck(e, Label::Src, &self.strict).map_err(|err| err.to_string())?;
        ensure(&src == ty, || {
            format!("source has type {src}, expected {ty}")
        })?;
        let outputs = [
            ("translation", translate(e), &self.strict),
            ("naive translation", naive_translate(e), &self.strict),
            ("sequential baseline", seq_translate(e), &self.relaxed),
        ];
        for (what, out, env) in outputs {
            if out.any(&|n| matches!(n.kind, Kind::Each(_))) {
                return Err(format!("{what} contains an effect mark"));
            }
            let t = typecheck(&out, Label::Tgt, env).map_err(|err| format!("{what}: {err}"))?;
            ensure(t == want, || {
                format!("{what} has type {t}, expected {want}")
            })?;
        }
        Ok(())
    }

    fn same_meaning(&self, a: &Term, la: Label, b: &Term, lb: Label, ty: &Ty) -> Check {
        for (m, env) in &self.monads {
            let va = eval(a, la, *m, env).map_err(|err| err.to_string())?;
            let vb = eval(b, lb, *m, env).map_err(|err| err.to_string())?;
            ensure(value_eq(&va, &vb, ty, *m), || {
                format!("results differ under the {m} monad")
            })?;
        }
        Ok(())
    }

    /// Like [`Self::same_meaning`] for a target `a` and a source `b`, except
    /// that traces only need to perform the same effects: the baseline gives
    /// up independence, so its dependency edges are expected to differ.
    fn same_up_to_order(&self, a: &Term, b: &Term, ty: &Ty) -> Check {
        use crate::semantics::{Action, Value};
        for (m, env) in &self.monads {
            let va = eval(a, Label::Tgt, *m, env).map_err(|err| err.to_string())?;
            let vb = eval(b, Label::Src, *m, env).map_err(|err| err.to_string())?;
            let same = match (&va, &vb) {
                (Value::Eff(Action::Trace(da, xa)), Value::Eff(Action::Trace(db, xb))) => {
                    let names = |d: &crate::metrics::Dag| {
                        let mut n: Vec<_> = d.nodes.iter().map(|n| (&n.name, &n.arg)).collect();
                        n.sort();
                        n.into_iter()
                            .map(|(a, b)| (a.clone(), b.clone()))
                            .collect::<Vec<_>>()
                    };
                    names(da) == names(db) && value_eq(xa, xb, ty, *m)
                }
                _ => value_eq(&va, &vb, &Ty::eff(ty.clone()), *m),
            };
            ensure(same, || format!("results differ under the {m} monad"))?;
        }
        Ok(())
    }

    fn stamped(&self, t: &Term) -> Result<Term, String> {
        stamp(t, t.label, &self.relaxed).map_err(|err| err.to_string())
    }

    /// Both static measures of `new` are bounded by those of `old`.
    fn no_costlier(&self, new: &Term, old: &Term) -> Check {
        let (n, o) = (self.stamped(new)?, self.stamped(old)?);
        le("span", span(&n), span(&o))?;
        le("work", work(&n), work(&o))?;
        le("join span", join_span(&n), join_span(&o))?;
        le("join work", join_work(&n), join_work(&o))
    }

    fn span_work(&self, e: &Term) -> Check {
        let p = self.stamped(&translate(e))?;
        le("span", span(&p), span(e))?;
        le("work", work(&p), work(e))?;
        le("join span", join_span(&p), join_span(e))?;
        le("join work", join_work(&p), join_work(e))?;
        le("source span vs work", span(e), work(e))?;
        le("translated span vs work", span(&p), work(&p))?;
        if let Some((_, env)) = self.monads.iter().find(|(m, _)| *m == Monad::Trace) {
            let trace = |t: &Term, l| -> Result<crate::metrics::Dag, String> {
                match eval(t, l, Monad::Trace, env).map_err(|err| err.to_string())? {
                    crate::semantics::Value::Eff(crate::semantics::Action::Trace(d, _)) => {
                        Ok((*d).clone())
                    }
                    _ => Err("trace evaluation produced no trace".into()),
                }
            };
            let ds = trace(e, Label::Src)?;
            let dyn_span = ds.dyn_span().map_err(|err| err.to_string())?;
            ensure((dyn_span, ds.dyn_work()) == (span(e), work(e)), || {
                format!(
                    "traced span/work {:?} differ from static {:?}",
                    (dyn_span, ds.dyn_work()),
                    (span(e), work(e))
                )
            })?;
            let dp = trace(&p, Label::Tgt)?;
            le(
                "traced translated span",
                dp.dyn_span().map_err(|err| err.to_string())?,
                span(e),
            )?;
            le("traced translated work", dp.dyn_work(), work(e))?;
        }
        Ok(())
    }

    fn smart_ctors(&self, e: &Term, ty: &Ty) -> Check {
        let smart = match &e.kind {
            Kind::Ap(f, x) => smart_ap((**f).clone(), (**x).clone()),
            Kind::Join(x) => smart_join((**x).clone()),
            // shrinking may leave other shapes; they say nothing about the property
            _ => return Ok(()),
        };
        let t = typecheck(&smart, Label::Tgt, &self.strict).map_err(|err| err.to_string())?;
        ensure(&t == ty, || {
            format!("smart constructor result has type {t}")
        })?;
        self.same_meaning(&smart, Label::Tgt, e, Label::Tgt, ty)?;
        self.no_costlier(&smart, e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SuiteConfig {
        SuiteConfig {
            seed: 11,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn every_suite_runs() {
        for s in SUITES {
            let r = run_suite(s, &cfg(), 20).unwrap();
            assert_eq!(r.suite, s);
            if s != "normal_form" {
                assert!(r.ok(), "{s}: {:?}", r.failures);
            }
        }
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!(
            run_suite("nope", &cfg(), 1),
            Err(SuiteError::UnknownSuite(_))
        ));
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run_suite("semantics", &cfg(), 30).unwrap();
        let b = run_suite("semantics", &cfg(), 30).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn broken_monad_diverges_from_the_baseline() {
        let c = SuiteConfig {
            monads: vec![Monad::Broken],
            ..cfg()
        };
        let r = run_suite("baseline", &c, 300).unwrap();
        assert!(r.failed() > 0);
        let f = &r.failures[0];
        let term = replay("baseline", &c, f.seed).unwrap();
        assert!(pretty(&term).len() >= f.term_pretty.len());
    }
}
