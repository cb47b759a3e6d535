use std::fmt;
use std::rc::Rc;

use crate::metrics::Dag;
use crate::pretty::quote;

pub type Fun = Rc<dyn Fn(Value) -> Value>;
pub type StateFn = Rc<dyn Fn(i64) -> (Value, i64)>;

#[derive(Clone)]
pub enum Value {
    Unit,
    Str(Rc<str>),
    Pair(Rc<(Value, Value)>),
    Fun(Fun),
    Eff(Action),
}

/// A monadic action. Each variant belongs to one family of monads.
#[derive(Clone)]
pub enum Action {
    Option(Option<Box<Value>>),
    State(StateFn),
    /// Value and log; used by both writer variants.
    Writer(Box<Value>, Rc<Vec<String>>),
    Trace(Rc<Dag>, Box<Value>),
}

impl Value {
    pub fn str(s: impl AsRef<str>) -> Value {
        Value::Str(Rc::from(s.as_ref()))
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Rc::new((a, b)))
    }

    pub fn fun(f: impl Fn(Value) -> Value + 'static) -> Value {
        Value::Fun(Rc::new(f))
    }

    pub fn apply(&self, arg: Value) -> Value {
        match self {
            Value::Fun(f) => f(arg),
            other => panic!("applied a non-function value {other}"),
        }
    }

    pub fn into_action(self) -> Action {
        match self {
            Value::Eff(a) => a,
            other => panic!("expected an action, found {other}"),
        }
    }

    pub fn fst(&self) -> Value {
        match self {
            Value::Pair(p) => p.0.clone(),
            other => panic!("projection from non-pair {other}"),
        }
    }

    pub fn snd(&self) -> Value {
        match self {
            Value::Pair(p) => p.1.clone(),
            other => panic!("projection from non-pair {other}"),
        }
    }

    /// Compact rendering used to tag effect arguments: strings unquoted.
    pub fn tag(&self) -> String {
        match self {
            Value::Str(s) => s.to_string(),
            Value::Pair(p) => format!("({}, {})", p.0.tag(), p.1.tag()),
            other => other.to_string(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Unit => write!(f, "()"),
            Value::Str(s) => write!(f, "{}", quote(s)),
            Value::Pair(p) => write!(f, "({}, {})", p.0, p.1),
            Value::Fun(_) => write!(f, "<fun>"),
            Value::Eff(_) => write!(f, "<action>"),
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
