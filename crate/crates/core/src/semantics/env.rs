use std::collections::BTreeMap;

use super::monad::{Behavior, Monad};
use super::value::Value;
use crate::ast::{ConstKind, Signature, Ty};

/// Interpretation of every declared constant under one monad.
#[derive(Clone)]
pub struct ConstEnv {
    values: BTreeMap<String, Value>,
}

impl ConstEnv {
    /// Builds values for every constant in `sig`. Effects not listed in
    /// `behaviors` use [`Behavior::Default`].
    pub fn new(sig: &Signature, m: Monad, behaviors: &BTreeMap<String, Behavior>) -> ConstEnv {
        let values = sig
            .iter()
            .map(|d| {
                let v = match d.kind {
                    ConstKind::Pure if d.name == "concat" && d.ty == concat_ty() => concat(),
                    ConstKind::Pure => synthesize(&d.ty, Source::prim(&d.name), m),
                    ConstKind::Effectful => {
                        let b = behaviors.get(&d.name).cloned().unwrap_or_default();
                        synthesize(&d.ty, Source::effect(&d.name, b), m)
                    }
                };
                (d.name.clone(), v)
            })
            .collect();
        ConstEnv { values }
    }

    pub fn default_for(sig: &Signature, m: Monad) -> ConstEnv {
        ConstEnv::new(sig, m, &BTreeMap::new())
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.values.get(name)
    }
}

fn concat_ty() -> Ty {
    Ty::arrow(Ty::Str, Ty::arrow(Ty::Str, Ty::Str))
}

fn concat() -> Value {
    Value::fun(|a| {
        Value::fun(move |b| match (&a, &b) {
            (Value::Str(x), Value::Str(y)) => Value::str(format!("{x}{y}")),
            _ => panic!("concat applied to non-strings"),
        })
    })
}

#[derive(Clone)]
struct Source {
    name: String,
    args: Vec<String>,
    /// `Some` for effects.
    behavior: Option<Behavior>,
}

impl Source {
    fn prim(name: &str) -> Source {
        Source {
            name: name.into(),
            args: vec![],
            behavior: None,
        }
    }

    fn effect(name: &str, b: Behavior) -> Source {
        Source {
            name: name.into(),
            args: vec![],
            behavior: Some(b),
        }
    }

    fn tag(&self) -> String {
        if self.args.is_empty() {
            self.name.clone()
        } else {
            format!("{}({})", self.name, self.args.join(", "))
        }
    }
}

/// A value of type `t` determined by the constant and its arguments.
/// An `Eff` layer becomes one primitive effect; effects nested in an
/// effect's result are named `<name>.inner`.
fn synthesize(t: &Ty, src: Source, m: Monad) -> Value {
    match t {
        Ty::Unit => Value::Unit,
        Ty::Str => Value::str(src.tag()),
        Ty::Prod(a, b) => {
            let mut l = src.clone();
            l.name.push_str(".1");
            let mut r = src;
            r.name.push_str(".2");
            Value::pair(synthesize(a, l, m), synthesize(b, r, m))
        }
        Ty::Arrow(_, b) => {
            let b = (**b).clone();
            Value::fun(move |v| {
                let mut s = src.clone();
                s.args.push(v.tag());
                synthesize(&b, s, m)
            })
        }
        Ty::Eff(a) => {
            let behavior = src.behavior.clone().unwrap_or_default();
            let arg = src.args.join(", ");
            let inner = Source {
                name: format!("{}.inner", src.name),
                args: src.args.clone(),
                behavior: Some(Behavior::Default),
            };
            let result = match &**a {
                Ty::Eff(_) => synthesize(a, inner, m),
                _ => synthesize(a, src.clone(), m),
            };
            Value::Eff(m.effect(&src.name, &arg, result, &behavior))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::value::Action;

    #[test]
    fn effect_results_and_tags() {
        let sig = Signature::standard();
        let env = ConstEnv::default_for(&sig, Monad::Writer);
        let a = env.get("fetch").unwrap().apply(Value::str("u"));
        match a {
            Value::Eff(Action::Writer(v, log)) => {
                assert_eq!(v.tag(), "fetch(u)");
                assert_eq!(*log, vec!["fetch(u)".to_string()]);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn nested_effects_are_separate_nodes() {
        let sig = Signature::standard();
        let env = ConstEnv::default_for(&sig, Monad::Trace);
        let m = Monad::Trace;
        let outer = env
            .get("nest")
            .unwrap()
            .apply(Value::str("u"))
            .into_action();
        let Action::Trace(d, _) = m.join(outer) else {
            panic!()
        };
        assert_eq!(d.dyn_work(), 2);
        assert_eq!(d.nodes[1].name, "nest.inner");
    }

    #[test]
    fn concat_concatenates() {
        let env = ConstEnv::default_for(&Signature::standard(), Monad::Option);
        let c = env.get("concat").unwrap();
        assert_eq!(c.apply(Value::str("a")).apply(Value::str("b")).tag(), "ab");
        assert_eq!(env.get("hello").unwrap().tag(), "hello");
    }

    #[test]
    fn configured_behaviors() {
        let sig = Signature::standard();
        let b = BTreeMap::from([("fetch".to_string(), Behavior::Absent)]);
        let env = ConstEnv::new(&sig, Monad::Option, &b);
        let a = env.get("fetch").unwrap().apply(Value::str("u"));
        assert!(matches!(a, Value::Eff(Action::Option(None))));
    }
}
