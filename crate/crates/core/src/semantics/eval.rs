use std::rc::Rc;

use thiserror::Error;

use super::env::ConstEnv;
use super::monad::Monad;
use super::value::Value;
use crate::ast::{Kind, Label, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("constant `{0}` has no interpretation")]
    SignatureMismatch(String),
    #[error("unbound variable `{0}`")]
    UnboundVar(String),
}

/// Variable bindings, innermost first.
#[derive(Clone, Default)]
pub struct Scope(Option<Rc<(String, Value, Scope)>>);

impl Scope {
    pub fn bind(&self, x: impl Into<String>, v: Value) -> Scope {
        Scope(Some(Rc::new((x.into(), v, self.clone()))))
    }

    fn lookup(&self, x: &str) -> Option<&Value> {
        let mut cur = &self.0;
        while let Some(node) = cur {
            if node.0 == x {
                return Some(&node.1);
            }
            cur = &node.2 .0;
        }
        None
    }
}

/// Evaluates a closed, well-typed term. At `Src` the result is the action
/// the direct-style term denotes; at `Com` and `Tgt` it is a plain value,
/// with target combinators mapped onto the monad's operations.
pub fn eval(e: &Term, label: Label, m: Monad, env: &ConstEnv) -> Result<Value, EvalError> {
    eval_in(e, label, m, env, &Scope::default())
}

pub fn eval_in(
    e: &Term,
    label: Label,
    m: Monad,
    env: &ConstEnv,
    scope: &Scope,
) -> Result<Value, EvalError> {
    let mut missing = None;
    e.walk(&mut |n| {
        if let Kind::Const(c) = &n.kind {
            if env.get(c).is_none() && missing.is_none() {
                missing = Some(c.clone());
            }
        }
    });
    if let Some(c) = missing {
        return Err(EvalError::SignatureMismatch(c));
    }
    let mut unbound = None;
    for x in e.free_vars() {
        if scope.lookup(&x).is_none() {
            unbound = Some(x);
            break;
        }
    }
    if let Some(x) = unbound {
        return Err(EvalError::UnboundVar(x));
    }
    let ev = Evaluator {
        m,
        env: Rc::new(env.clone()),
    };
    Ok(match label {
        Label::Src => ev.src(e, scope),
        Label::Com | Label::Tgt => ev.direct(e, scope),
    })
}

#[derive(Clone)]
struct Evaluator {
    m: Monad,
    env: Rc<ConstEnv>,
}

fn pairer() -> Value {
    Value::fun(|a| Value::fun(move |b| Value::pair(a.clone(), b)))
}

impl Evaluator {
    fn src(&self, e: &Term, scope: &Scope) -> Value {
        let m = self.m;
        let act = match &e.kind {
            Kind::Var(_) | Kind::Const(_) | Kind::Lam(..) | Kind::Unt | Kind::Lit(_) => {
                m.pure(self.direct(e, scope))
            }
            Kind::Fst(p) => m.map(Rc::new(|v| v.fst()), self.src(p, scope).into_action()),
            Kind::Snd(p) => m.map(Rc::new(|v| v.snd()), self.src(p, scope).into_action()),
            Kind::App(f, a) => m.ap(
                self.src(f, scope).into_action(),
                self.src(a, scope).into_action(),
            ),
            Kind::Prd(a, b) => m.ap(
                m.map(
                    Rc::new(|x| pairer().apply(x)),
                    self.src(a, scope).into_action(),
                ),
                self.src(b, scope).into_action(),
            ),
            Kind::Each(x) => m.join(self.src(x, scope).into_action()),
            Kind::Pure(_) | Kind::Map(..) | Kind::Ap(..) | Kind::Join(_) => {
                panic!("target combinator in a source term")
            }
        };
        Value::Eff(act)
    }

    fn direct(&self, e: &Term, scope: &Scope) -> Value {
        let m = self.m;
        match &e.kind {
            Kind::Var(x) => scope.lookup(x).expect("checked free variables").clone(),
            Kind::Const(c) => self.env.get(c).expect("checked constants").clone(),
            Kind::Unt => Value::Unit,
            Kind::Lit(s) => Value::str(s),
            Kind::Prd(a, b) => Value::pair(self.direct(a, scope), self.direct(b, scope)),
            Kind::Fst(p) => self.direct(p, scope).fst(),
            Kind::Snd(p) => self.direct(p, scope).snd(),
            Kind::App(f, a) => self.direct(f, scope).apply(self.direct(a, scope)),
            Kind::Lam(x, body) => {
                let (ev, scope, x, body) = (self.clone(), scope.clone(), x.clone(), body.clone());
                Value::fun(move |v| ev.direct(&body, &scope.bind(x.clone(), v)))
            }
            Kind::Each(_) => panic!("effect mark outside a source term"),
            Kind::Pure(x) => Value::Eff(m.pure(self.direct(x, scope))),
            Kind::Map(f, x) => {
                let f = self.direct(f, scope);
                let x = self.direct(x, scope).into_action();
                Value::Eff(m.map(Rc::new(move |v| f.apply(v)), x))
            }
            Kind::Ap(f, x) => {
                let f = self.direct(f, scope).into_action();
                let x = self.direct(x, scope).into_action();
                Value::Eff(m.ap(f, x))
            }
            Kind::Join(x) => Value::Eff(m.join(self.direct(x, scope).into_action())),
        }
    }
}
