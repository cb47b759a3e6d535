//! Evaluation of terms under a pluggable monad.

mod env;
mod eval;
mod laws;
mod monad;
mod value;

pub use env::ConstEnv;
pub use eval::{eval, eval_in, EvalError, Scope};
pub use laws::{check_laws, LawReport, LawResult, LAWS};
pub use monad::{sample_value, value_eq, Behavior, Kleisli, Monad, EXTENSIONAL_ARGS};
pub use value::{Action, Fun, StateFn, Value};
