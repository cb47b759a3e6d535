//! Law-based rewriting of target terms.
//!
//! Rules are applied innermost first in repeated bottom-up passes until
//! nothing changes. `Bind g x` below abbreviates `Join(Map(g, x))`.
//!
//! | rule           | rewrite                                                   |
//! |----------------|-----------------------------------------------------------|
//! | map_identity   | `Map(fun x -> x, e)` to `e`                               |
//! | map_compose    | `Map(f, Map(g, e))` to `Map(fun x -> f (g x), e)`         |
//! | homomorphism   | `Ap(Pure f, Pure e)` to `Pure(f e)`                       |
//! | apl            | `Ap(Pure f, e)` to `Map(fun x -> f x, e)`                 |
//! | apr            | `Ap(f, Pure e)` to `Map(fun g -> g e, f)`                 |
//! | map_pure       | `Map(f, Pure e)` to `Pure(f e)`                           |
//! | left_unit      | `Join(Pure e)` to `e`; `Bind f (Pure e)` to `f e`         |
//! | right_unit     | `Bind (fun x -> Pure x) e` to `e`                         |
//! | associativity  | `Bind g (Bind f e)` to `Bind (fun x -> Bind g (f x)) e`   |
//! | eta            | `fun x -> f x` to `f` when `x` is not free in `f`         |
//! | ap_compose     | `Ap(u, Ap(v, w))` to `Ap(Ap(Map(compose, u), v), w)`      |
//!
//! `map_compose` and `map_pure` need the functions involved to be free of
//! combinators so they can move into the common fragment. `ap_compose` only
//! runs when [`Options::reassoc`] is set.

use thiserror::Error;

use crate::ast::{relabel, restamp_spine, Fresh, Kind, Label, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("no fixed point within {fuel} rewrite steps")]
    FuelExhausted { fuel: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Options {
    pub reassoc: bool,
}

pub fn normalize(e: &Term) -> Result<Term, NormalizeError> {
    normalize_with(e, Options::default())
}

pub fn normalize_with(e: &Term, opts: Options) -> Result<Term, NormalizeError> {
    let fuel = 4 * e.size();
    let mut n = Normalizer {
        fresh: Fresh::above(&[e]),
        opts,
        steps: 0,
        fuel,
    };
    let mut cur = e.clone();
    loop {
        let before = n.steps;
        cur = n.pass(cur)?;
        if n.steps == before {
            return Ok(cur);
        }
    }
}

struct Normalizer {
    fresh: Fresh,
    opts: Options,
    steps: usize,
    fuel: usize,
}

/// Moves a target term with no combinators on its spine into the common
/// fragment.
fn lower(t: &Term) -> Option<Term> {
    fn ok(t: &Term) -> bool {
        match &t.kind {
            Kind::Pure(_) | Kind::Map(..) | Kind::Ap(..) | Kind::Join(_) | Kind::Each(_) => false,
            Kind::Lam(_, b) => b.label == Label::Com,
            _ => t.children().into_iter().all(ok),
        }
    }
    if t.label == Label::Com {
        return Some(t.clone());
    }
    ok(t).then(|| restamp_spine(t, Label::Com))
}

fn is_var(t: &Term, x: &str) -> bool {
    matches!(&t.kind, Kind::Var(y) if y == x)
}

fn com(kind: Kind) -> Term {
    Term::new(Label::Com, kind)
}

impl Normalizer {
    fn pass(&mut self, mut t: Term) -> Result<Term, NormalizeError> {
        for c in t.children_mut() {
            let child = std::mem::replace(c, Term::unt(Label::Com));
            *c = self.pass(child)?;
        }
        while let Some(next) = self.step(&t) {
            self.steps += 1;
            if self.steps > self.fuel {
                return Err(NormalizeError::FuelExhausted { fuel: self.fuel });
            }
            t = next;
        }
        Ok(t)
    }

    fn lam(&mut self, label: Label, body: impl FnOnce(Term) -> Term) -> Term {
        let x = self.fresh.name();
        let v = Term::var(Label::Com, &x);
        Term::lam(label, x, body(v))
    }

    /// One rewrite at the root, if any rule applies.
    fn step(&mut self, t: &Term) -> Option<Term> {
        match &t.kind {
            Kind::Lam(x, body) => {
                if let Kind::App(f, a) = &body.kind {
                    if body.label == Label::Com && is_var(a, x) && !f.free_vars().contains(x) {
                        return Some(restamp_spine(f, t.label));
                    }
                }
                None
            }
            Kind::Map(f, e) => {
                if let Kind::Lam(x, b) = &f.kind {
                    if is_var(b, x) {
                        return Some((**e).clone());
                    }
                }
                if let Kind::Pure(v) = &e.kind {
                    if let Some(f) = lower(f) {
                        return Some(Term::pure(com(Kind::App(Box::new(f), v.clone()))));
                    }
                }
                if let Kind::Map(g, inner) = &e.kind {
                    if let (Some(f), Some(g)) = (lower(f), lower(g)) {
                        let composed = self.lam(Label::Tgt, |x| {
                            com(Kind::App(
                                Box::new(f),
                                Box::new(com(Kind::App(Box::new(g), Box::new(x)))),
                            ))
                        });
                        return Some(Term::map(composed, (**inner).clone()));
                    }
                }
                None
            }
            Kind::Ap(f, e) => match (&f.kind, &e.kind) {
                (Kind::Pure(f), Kind::Pure(e)) => {
                    Some(Term::pure(com(Kind::App(f.clone(), e.clone()))))
                }
                (Kind::Pure(f), _) => {
                    let f = (**f).clone();
                    let lifted = self.lam(Label::Tgt, |x| com(Kind::App(Box::new(f), Box::new(x))));
                    Some(Term::map(lifted, (**e).clone()))
                }
                (_, Kind::Pure(v)) => {
                    let v = (**v).clone();
                    let apply = self.lam(Label::Tgt, |g| com(Kind::App(Box::new(g), Box::new(v))));
                    Some(Term::map(apply, (**f).clone()))
                }
                (_, Kind::Ap(v, w)) if self.opts.reassoc => {
                    let compose = self.compose();
                    let u = Term::map(compose, (**f).clone());
                    Some(Term::ap(Term::ap(u, (**v).clone()), (**w).clone()))
                }
                _ => None,
            },
            Kind::Join(inner) => match &inner.kind {
                Kind::Pure(c) => Some(relabel(c, Label::Tgt).expect("pure payloads are common")),
                Kind::Map(f, x) => {
                    if let Kind::Pure(v) = &x.kind {
                        let v = relabel(v, Label::Tgt).expect("pure payloads are common");
                        return Some(Term::app(Label::Tgt, (**f).clone(), v));
                    }
                    if let Kind::Lam(y, b) = &f.kind {
                        if let Kind::Pure(p) = &b.kind {
                            if is_var(p, y) {
                                return Some((**x).clone());
                            }
                        }
                    }
                    if let Kind::Join(x2) = &x.kind {
                        if let Kind::Map(g0, e) = &x2.kind {
                            let (g, f0) = ((**f).clone(), (**g0).clone());
                            let body = self.lam(Label::Tgt, |v| {
                                let call = Term::app(Label::Tgt, f0, restamp_spine(&v, Label::Tgt));
                                Term::join(Term::map(g, call))
                            });
                            return Some(Term::join(Term::map(body, (**e).clone())));
                        }
                    }
                    None
                }
                _ => None,
            },
            _ => None,
        }
    }

    /// `fun f -> fun g -> fun x -> f (g x)`.
    fn compose(&mut self) -> Term {
        let (f, g, x) = (self.fresh.name(), self.fresh.name(), self.fresh.name());
        let v = |n: &str| Term::var(Label::Com, n);
        let body = com(Kind::App(
            Box::new(v(&f)),
            Box::new(com(Kind::App(Box::new(v(&g)), Box::new(v(&x))))),
        ));
        Term::lam(
            Label::Tgt,
            f,
            Term::lam(Label::Com, g, Term::lam(Label::Com, x, body)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{alpha_eq, Label::*, Signature};
    use crate::typing::{typecheck, TypeEnv};

    fn c(l: Label, n: &str) -> Term {
        Term::constant(l, n)
    }

    fn fetch_lit(s: &str) -> Term {
        Term::app(Tgt, c(Tgt, "fetch"), Term::lit(Tgt, s))
    }

    #[test]
    fn left_unit() {
        let e = Term::join(Term::pure(c(Com, "ff")));
        assert_eq!(normalize(&e).unwrap(), c(Tgt, "ff"));
    }

    #[test]
    fn map_identity() {
        let e = Term::map(Term::lam(Tgt, "x", Term::var(Com, "x")), fetch_lit("a"));
        assert_eq!(normalize(&e).unwrap(), fetch_lit("a"));
    }

    #[test]
    fn apl_then_eta() {
        let e = Term::ap(Term::pure(c(Com, "fetch")), fetch_lit("a"));
        let want = Term::map(c(Tgt, "fetch"), fetch_lit("a"));
        assert!(alpha_eq(&normalize(&e).unwrap(), &want));
    }

    #[test]
    fn right_unit() {
        let e = Term::join(Term::map(
            Term::lam(Tgt, "x", Term::pure(Term::var(Com, "x"))),
            fetch_lit("a"),
        ));
        assert_eq!(normalize(&e).unwrap(), fetch_lit("a"));
    }

    #[test]
    fn associativity_nests_the_continuation() {
        let bind = |f: Term, x: Term| Term::join(Term::map(f, x));
        let e = bind(c(Tgt, "fetch"), bind(c(Tgt, "fetch"), fetch_lit("a")));
        let n = normalize(&e).unwrap();
        let env = TypeEnv::new(Signature::standard()).relaxed();
        assert_eq!(typecheck(&n, Tgt, &env), typecheck(&e, Tgt, &env));
        let Kind::Join(m) = &n.kind else {
            panic!("{n:?}")
        };
        let Kind::Map(f, x) = &m.kind else { panic!() };
        assert_eq!(**x, fetch_lit("a"));
        assert!(matches!(&f.kind, Kind::Lam(_, b) if b.label == Tgt));
    }

    #[test]
    fn map_fusion() {
        let e = Term::map(c(Tgt, "dup"), Term::map(c(Tgt, "concat_a"), fetch_lit("a")));
        let mut sig = Signature::standard();
        sig.declare(
            "concat_a",
            crate::ast::Ty::arrow(crate::ast::Ty::Str, crate::ast::Ty::Str),
            crate::ast::ConstKind::Pure,
        )
        .unwrap();
        let n = normalize(&e).unwrap();
        let Kind::Map(_, x) = &n.kind else { panic!() };
        assert_eq!(**x, fetch_lit("a"));
        let env = TypeEnv::new(sig);
        assert_eq!(typecheck(&n, Tgt, &env), typecheck(&e, Tgt, &env));
    }

    #[test]
    fn reassociation_is_opt_in() {
        let e = Term::ap(c(Tgt, "u"), Term::ap(c(Tgt, "v"), c(Tgt, "w")));
        assert_eq!(normalize(&e).unwrap(), e);
        let r = normalize_with(&e, Options { reassoc: true }).unwrap();
        let Kind::Ap(_, w) = &r.kind else { panic!() };
        assert_eq!(**w, c(Tgt, "w"));
    }

    #[test]
    fn normal_forms_are_fixed() {
        let e = Term::ap(fetch_lit("a"), fetch_lit("b"));
        assert_eq!(normalize(&e).unwrap(), e);
    }
}
