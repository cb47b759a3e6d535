//! Static span and work of terms, and dynamic measures over effect traces.
//!
//! Two static measures are provided. [`join_span`] and [`join_work`] are
//! the plain structural recursions that count `Each` and `Join` nodes.
//! [`span`] and [`work`] measure what running a term costs: a target term
//! of type `Eff t` is a description of an action, and its cost is the cost
//! of the effects that description performs when it is run. Source and
//! common terms are measured structurally by both.

mod dag;

pub use dag::{Dag, DagNode, MetricsError};

use crate::ast::{Kind, Label, Term};

#[derive(Clone, Copy)]
enum Combine {
    Max,
    Sum,
}

impl Combine {
    fn apply(self, a: u64, b: u64) -> u64 {
        match self {
            Combine::Max => a.max(b),
            Combine::Sum => a + b,
        }
    }
}

fn structural(e: &Term, c: Combine) -> u64 {
    match &e.kind {
        Kind::Var(_)
        | Kind::Const(_)
        | Kind::Unt
        | Kind::Lit(_)
        | Kind::Lam(..)
        | Kind::Pure(_) => 0,
        Kind::Fst(x) | Kind::Snd(x) => structural(x, c),
        Kind::Prd(a, b) | Kind::App(a, b) | Kind::Ap(a, b) | Kind::Map(a, b) => {
            c.apply(structural(a, c), structural(b, c))
        }
        Kind::Join(x) | Kind::Each(x) => 1 + structural(x, c),
    }
}

/// Longest chain of `Each`/`Join` nodes, ignoring labels and types.
pub fn join_span(e: &Term) -> u64 {
    structural(e, Combine::Max)
}

/// Number of `Each`/`Join` nodes outside lambdas and `Pure` payloads.
pub fn join_work(e: &Term) -> u64 {
    structural(e, Combine::Sum)
}

/// Span of running `e`. Target terms should carry type stamps (see
/// [`crate::typing::stamp`]); an unstamped opaque action counts as one effect.
pub fn span(e: &Term) -> u64 {
    measure(e, Combine::Max)
}

/// Work of running `e`; see [`span`].
pub fn work(e: &Term) -> u64 {
    measure(e, Combine::Sum)
}

fn measure(e: &Term, c: Combine) -> u64 {
    match e.label {
        Label::Tgt => run(e, c),
        Label::Src | Label::Com => structural(e, c),
    }
}

fn run(e: &Term, c: Combine) -> u64 {
    match &e.kind {
        Kind::Pure(_) => 0,
        Kind::Map(_, x) => run(x, c),
        Kind::Ap(f, x) => c.apply(run(f, c), run(x, c)),
        Kind::Join(inner) => match &inner.kind {
            Kind::Map(f, x) => match &f.kind {
                Kind::Lam(_, body) => run(x, c) + run_body(body, c),
                _ => run(x, c) + 1,
            },
            _ => run(inner, c) + 1,
        },
        _ => opaque(e, c),
    }
}

fn run_body(body: &Term, c: Combine) -> u64 {
    if body.label == Label::Tgt {
        run(body, c)
    } else {
        opaque(body, c)
    }
}

/// Cost of running a term whose action is computed rather than built
/// from combinators.
fn opaque(e: &Term, c: Combine) -> u64 {
    if let Kind::App(f, _) = &e.kind {
        if let Kind::Lam(_, body) = &f.kind {
            if body.label == Label::Tgt {
                return run(body, c);
            }
        }
    }
    match &e.ty {
        Some(t) if !t.is_eff() => 0,
        _ => 1,
    }
}
