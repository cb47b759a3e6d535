use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::value::{Action, Fun, Value};
use crate::ast::Ty;
use crate::metrics::Dag;

pub type Kleisli = Rc<dyn Fn(Value) -> Action>;

/// The interpreters terms can be run in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Monad {
    Option,
    /// Integer store threaded left to right.
    State,
    /// Text log, appended left to right.
    Writer,
    /// Effect dependency graph; `ap` composes in parallel.
    Trace,
    /// A writer whose `ap` logs its argument before its function while
    /// `bind` logs left to right.
    Broken,
}

impl Monad {
    pub const BUILTIN: [Monad; 4] = [Monad::Option, Monad::State, Monad::Writer, Monad::Trace];
    pub const ALL: [Monad; 5] = [
        Monad::Option,
        Monad::State,
        Monad::Writer,
        Monad::Trace,
        Monad::Broken,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Monad::Option => "option",
            Monad::State => "state",
            Monad::Writer => "writer",
            Monad::Trace => "trace",
            Monad::Broken => "broken",
        }
    }

    pub fn pure(self, v: Value) -> Action {
        match self {
            Monad::Option => Action::Option(Some(Box::new(v))),
            Monad::State => Action::State(Rc::new(move |s| (v.clone(), s))),
            Monad::Writer | Monad::Broken => Action::Writer(Box::new(v), Rc::new(vec![])),
            Monad::Trace => Action::Trace(Rc::new(Dag::empty()), Box::new(v)),
        }
    }

    pub fn map(self, f: Fun, a: Action) -> Action {
        match a {
            Action::Option(v) => Action::Option(v.map(|v| Box::new(f(*v)))),
            Action::State(m) => Action::State(Rc::new(move |s| {
                let (v, s) = m(s);
                (f(v), s)
            })),
            Action::Writer(v, log) => Action::Writer(Box::new(f(*v)), log),
            Action::Trace(d, v) => Action::Trace(d, Box::new(f(*v))),
        }
    }

    pub fn ap(self, af: Action, ax: Action) -> Action {
        match (af, ax) {
            (Action::Option(f), Action::Option(x)) => {
                Action::Option(f.zip(x).map(|(f, x)| Box::new(f.apply(*x))))
            }
            (Action::State(mf), Action::State(mx)) => Action::State(Rc::new(move |s| {
                let (f, s) = mf(s);
                let (x, s) = mx(s);
                (f.apply(x), s)
            })),
            (Action::Writer(f, lf), Action::Writer(x, lx)) => {
                let log = if self == Monad::Broken {
                    concat_logs(&lx, &lf)
                } else {
                    concat_logs(&lf, &lx)
                };
                Action::Writer(Box::new(f.apply(*x)), log)
            }
            (Action::Trace(df, f), Action::Trace(dx, x)) => {
                Action::Trace(Rc::new(df.par(&dx)), Box::new(f.apply(*x)))
            }
            _ => panic!("actions from different monads combined"),
        }
    }

    pub fn bind(self, k: Kleisli, a: Action) -> Action {
        match a {
            Action::Option(v) => match v {
                Some(v) => k(*v),
                None => Action::Option(None),
            },
            Action::State(m) => Action::State(Rc::new(move |s| {
                let (v, s) = m(s);
                match k(v) {
                    Action::State(n) => n(s),
                    _ => panic!("actions from different monads combined"),
                }
            })),
            Action::Writer(v, l1) => match k(*v) {
                Action::Writer(w, l2) => Action::Writer(w, concat_logs(&l1, &l2)),
                _ => panic!("actions from different monads combined"),
            },
            Action::Trace(d1, v) => match k(*v) {
                Action::Trace(d2, w) => Action::Trace(Rc::new(d1.seq(&d2)), w),
                _ => panic!("actions from different monads combined"),
            },
        }
    }

    /// `bind id`.
    pub fn join(self, a: Action) -> Action {
        self.bind(Rc::new(Value::into_action), a)
    }

    /// One primitive effect named `name` applied to `arg`, returning
    /// `result` unless the behavior overrides it.
    pub fn effect(self, name: &str, arg: &str, result: Value, behavior: &Behavior) -> Action {
        let tag = if arg.is_empty() {
            name.to_string()
        } else {
            format!("{name}({arg})")
        };
        let result = match behavior {
            Behavior::Value(p) => Value::str(p),
            _ => result,
        };
        match self {
            Monad::Option => match behavior {
                Behavior::Absent => Action::Option(None),
                _ => Action::Option(Some(Box::new(result))),
            },
            Monad::State => {
                let incr = match behavior {
                    Behavior::StateIncr(k) => *k,
                    _ => 1,
                };
                let stamp_state = !matches!(behavior, Behavior::Value(_));
                Action::State(Rc::new(move |s| {
                    let v = match (&result, stamp_state) {
                        (Value::Str(r), true) => Value::str(format!("{r}@{s}")),
                        _ => result.clone(),
                    };
                    (v, s + incr)
                }))
            }
            Monad::Writer | Monad::Broken => {
                let entry = match behavior {
                    Behavior::Log(p) => p.clone(),
                    _ => tag,
                };
                Action::Writer(Box::new(result), Rc::new(vec![entry]))
            }
            Monad::Trace => Action::Trace(Rc::new(Dag::single(name, arg)), Box::new(result)),
        }
    }

    /// Observational equality of two actions producing values of type `t`.
    pub fn run_eq(self, a: &Action, b: &Action, t: &Ty) -> bool {
        match (a, b) {
            (Action::Option(x), Action::Option(y)) => match (x, y) {
                (None, None) => true,
                (Some(x), Some(y)) => value_eq(x, y, t, self),
                _ => false,
            },
            (Action::State(m), Action::State(n)) => (0..3).all(|s| {
                let (x, s1) = m(s);
                let (y, s2) = n(s);
                s1 == s2 && value_eq(&x, &y, t, self)
            }),
            (Action::Writer(x, lx), Action::Writer(y, ly)) => lx == ly && value_eq(x, y, t, self),
            (Action::Trace(dx, x), Action::Trace(dy, y)) => {
                dx.isomorphic(dy) && value_eq(x, y, t, self)
            }
            _ => false,
        }
    }

    /// A random action producing a value of type `t`.
    pub fn sample_action(self, t: &Ty, rng: &mut ChaCha8Rng) -> Action {
        let v = sample_value(t, rng, self);
        match self {
            Monad::Option => {
                if rng.gen_bool(0.2) {
                    Action::Option(None)
                } else {
                    Action::Option(Some(Box::new(v)))
                }
            }
            Monad::State => {
                let k = rng.gen_range(0..3);
                Action::State(Rc::new(move |s| {
                    let out = match &v {
                        Value::Str(r) => Value::str(format!("{r}@{s}")),
                        other => other.clone(),
                    };
                    (out, s + k)
                }))
            }
            Monad::Writer | Monad::Broken => {
                let n = rng.gen_range(0..3);
                let log = (0..n)
                    .map(|_| format!("w{}", rng.gen_range(0..4)))
                    .collect();
                Action::Writer(Box::new(v), Rc::new(log))
            }
            Monad::Trace => {
                let mut d = Dag::empty();
                for _ in 0..rng.gen_range(0..3) {
                    let node = Dag::single(format!("e{}", rng.gen_range(0..3)), "");
                    d = if rng.gen_bool(0.5) {
                        d.par(&node)
                    } else {
                        d.seq(&node)
                    };
                }
                Action::Trace(Rc::new(d), Box::new(v))
            }
        }
    }
}

impl fmt::Display for Monad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Monad {
    type Err = String;
    fn from_str(s: &str) -> Result<Monad, String> {
        Monad::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown monad `{s}`"))
    }
}

/// How a primitive effect behaves when run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum Behavior {
    #[default]
    Default,
    /// Return this string.
    Value(String),
    /// Fail (option monad only).
    Absent,
    /// Add this amount to the store (state monad only).
    StateIncr(i64),
    /// Log this entry instead of the effect's tag (writer monads only).
    Log(String),
}

fn concat_logs(a: &Rc<Vec<String>>, b: &Rc<Vec<String>>) -> Rc<Vec<String>> {
    if b.is_empty() {
        return a.clone();
    }
    if a.is_empty() {
        return b.clone();
    }
    let mut v = (**a).clone();
    v.extend(b.iter().cloned());
    Rc::new(v)
}

const STRINGS: [&str; 4] = ["a", "b", "xy", ""];

/// A random value of type `t`. Functions are deterministic in their
/// argument's rendering.
pub fn sample_value(t: &Ty, rng: &mut ChaCha8Rng, m: Monad) -> Value {
    match t {
        Ty::Unit => Value::Unit,
        Ty::Str => Value::str(STRINGS[rng.gen_range(0..STRINGS.len())]),
        Ty::Prod(a, b) => {
            let a = sample_value(a, rng, m);
            Value::pair(a, sample_value(b, rng, m))
        }
        Ty::Arrow(_, b) => {
            let salt: u64 = rng.gen();
            let b = (**b).clone();
            Value::fun(move |v| {
                let mut h = DefaultHasher::new();
                v.tag().hash(&mut h);
                let mut r = ChaCha8Rng::seed_from_u64(salt ^ h.finish());
                sample_value(&b, &mut r, m)
            })
        }
        Ty::Eff(a) => Value::Eff(m.sample_action(a, rng)),
    }
}

/// Number of arguments functions are compared at.
pub const EXTENSIONAL_ARGS: usize = 5;

/// Observational equality at type `t`: functions extensionally, actions
/// with [`Monad::run_eq`].
pub fn value_eq(a: &Value, b: &Value, t: &Ty, m: Monad) -> bool {
    match (a, b, t) {
        (Value::Unit, Value::Unit, _) => true,
        (Value::Str(x), Value::Str(y), _) => x == y,
        (Value::Pair(p), Value::Pair(q), Ty::Prod(ta, tb)) => {
            value_eq(&p.0, &q.0, ta, m) && value_eq(&p.1, &q.1, tb, m)
        }
        (Value::Fun(f), Value::Fun(g), Ty::Arrow(ta, tb)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x00e7_e45e);
            (0..EXTENSIONAL_ARGS).all(|_| {
                let x = sample_value(ta, &mut rng, m);
                value_eq(&f(x.clone()), &g(x), tb, m)
            })
        }
        (Value::Eff(x), Value::Eff(y), Ty::Eff(t)) => m.run_eq(x, y, t),
        _ => false,
    }
}
