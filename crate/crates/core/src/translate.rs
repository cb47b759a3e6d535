//! Source to target translation.
//!
//! [`translate`] is the optimizing one-pass translation: every recursive
//! result is combined with the smart constructors [`smart_ap`] and
//! [`smart_join`], which collapse `Pure` operands on the spot.
//! [`naive_translate`] uses the raw constructors and [`seq_translate`]
//! additionally replaces every `Ap` with left-to-right monadic sequencing.

use serde::{Deserialize, Serialize};

use crate::ast::{relabel, restamp_spine, Fresh, Kind, Label, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Opt,
    Naive,
    Seq,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Mode, String> {
        match s {
            "opt" => Ok(Mode::Opt),
            "naive" => Ok(Mode::Naive),
            "seq" => Ok(Mode::Seq),
            _ => Err(format!("unknown mode `{s}` (expected opt, naive or seq)")),
        }
    }
}

pub fn translate_with(e: &Term, mode: Mode) -> Term {
    match mode {
        Mode::Opt => translate(e),
        Mode::Naive => naive_translate(e),
        Mode::Seq => seq_translate(e),
    }
}

/// The optimizing translation of a source term.
pub fn translate(e: &Term) -> Term {
    let mut fresh = Fresh::above(&[e]);
    go(e, &mut fresh, true)
}

/// The same equations with raw `Ap` and `Join`.
pub fn naive_translate(e: &Term) -> Term {
    let mut fresh = Fresh::above(&[e]);
    go(e, &mut fresh, false)
}

/// The do-notation baseline: the naive translation with every
/// `Ap(fs, xs)` replaced by `bind (fun g -> map (fun y -> g y) xs) fs`,
/// bind being `Join . Map`. The output contains no `Ap` node.
pub fn seq_translate(e: &Term) -> Term {
    let naive = naive_translate(e);
    let mut fresh = Fresh::above(&[&naive]);
    sequentialize(&naive, &mut fresh)
}

/// `AP` with a fresh-name supply derived from its arguments.
pub fn smart_ap(f: Term, e: Term) -> Term {
    let mut fresh = Fresh::above(&[&f, &e]);
    ap(f, e, &mut fresh)
}

/// `JOIN`: `Pure c` becomes `c` relabeled to the target fragment.
pub fn smart_join(e: Term) -> Term {
    match e.kind {
        Kind::Pure(c) => relabel(&c, Label::Tgt).expect("pure payloads are common"),
        kind => Term::join(Term { kind, ..e }),
    }
}

fn ap(f: Term, e: Term, fresh: &mut Fresh) -> Term {
    match (f.kind, e.kind) {
        (Kind::Pure(f), Kind::Pure(e)) => Term::pure(Term::app(Label::Com, *f, *e)),
        (Kind::Pure(f), ekind) => {
            let x = fresh.name();
            let body = Term::app(Label::Com, *f, Term::var(Label::Com, &x));
            Term::map(Term::lam(Label::Tgt, x, body), Term { kind: ekind, ..e })
        }
        (fkind, Kind::Pure(e)) => {
            let g = fresh.name();
            let body = Term::app(Label::Com, Term::var(Label::Com, &g), *e);
            Term::map(Term::lam(Label::Tgt, g, body), Term { kind: fkind, ..f })
        }
        (fkind, ekind) => Term::ap(Term { kind: fkind, ..f }, Term { kind: ekind, ..e }),
    }
}

fn combine_ap(f: Term, e: Term, fresh: &mut Fresh, smart: bool) -> Term {
    if smart {
        ap(f, e, fresh)
    } else {
        Term::ap(f, e)
    }
}

fn lift(fresh: &mut Fresh, build: impl FnOnce(Term) -> Term) -> Term {
    let y = fresh.name();
    Term::pure(Term::lam(Label::Com, &y, build(Term::var(Label::Com, &y))))
}

fn go(e: &Term, fresh: &mut Fresh, smart: bool) -> Term {
    match &e.kind {
        Kind::Var(_) | Kind::Const(_) | Kind::Unt | Kind::Lit(_) | Kind::Lam(..) => {
            Term::pure(restamp_spine(e, Label::Com))
        }
        Kind::Fst(p) => {
            let proj = lift(fresh, |y| Term::fst(Label::Com, y));
            let p = go(p, fresh, smart);
            combine_ap(proj, p, fresh, smart)
        }
        Kind::Snd(p) => {
            let proj = lift(fresh, |y| Term::snd(Label::Com, y));
            let p = go(p, fresh, smart);
            combine_ap(proj, p, fresh, smart)
        }
        Kind::Prd(a, b) => {
            let (x, y) = (fresh.name(), fresh.name());
            let pair = Term::prd(
                Label::Com,
                Term::var(Label::Com, &x),
                Term::var(Label::Com, &y),
            );
            let pairer = Term::pure(Term::lam(Label::Com, x, Term::lam(Label::Com, y, pair)));
            let a = go(a, fresh, smart);
            let partial = combine_ap(pairer, a, fresh, smart);
            let b = go(b, fresh, smart);
            combine_ap(partial, b, fresh, smart)
        }
        Kind::App(f, a) => {
            let f = go(f, fresh, smart);
            let a = go(a, fresh, smart);
            combine_ap(f, a, fresh, smart)
        }
        Kind::Each(x) => {
            let x = go(x, fresh, smart);
            if smart {
                smart_join(x)
            } else {
                Term::join(x)
            }
        }
        Kind::Pure(_) | Kind::Map(..) | Kind::Ap(..) | Kind::Join(_) => {
            panic!("translate expects a source term, found a target combinator")
        }
    }
}

fn sequentialize(e: &Term, fresh: &mut Fresh) -> Term {
    match &e.kind {
        Kind::Ap(fs, xs) => {
            let fs = sequentialize(fs, fresh);
            let xs = sequentialize(xs, fresh);
            let (g, y) = (fresh.name(), fresh.name());
            let apply = Term::app(
                Label::Com,
                Term::var(Label::Com, &g),
                Term::var(Label::Com, &y),
            );
            let inner = Term::map(Term::lam(Label::Tgt, y, apply), xs);
            Term::join(Term::map(Term::lam(Label::Tgt, g, inner), fs))
        }
        Kind::Map(f, x) => Term::map(sequentialize(f, fresh), sequentialize(x, fresh)),
        Kind::Join(x) => Term::join(sequentialize(x, fresh)),
        _ => e.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{alpha_eq, Label::*};

    fn c(l: Label, n: &str) -> Term {
        Term::constant(l, n)
    }

    #[test]
    fn leaves_wrap_in_pure() {
        assert_eq!(
            translate(&Term::var(Src, "x")),
            Term::pure(Term::var(Com, "x"))
        );
        assert_eq!(
            naive_translate(&Term::var(Src, "x")),
            Term::pure(Term::var(Com, "x"))
        );
        assert_eq!(
            seq_translate(&Term::var(Src, "x")),
            Term::pure(Term::var(Com, "x"))
        );
    }

    #[test]
    fn ap_cases() {
        let id = Term::lam(Com, "x", Term::var(Com, "x"));
        assert_eq!(
            smart_ap(Term::pure(id.clone()), Term::pure(Term::unt(Com))),
            Term::pure(Term::app(Com, id, Term::unt(Com)))
        );
        let got = smart_ap(Term::pure(c(Com, "g")), c(Tgt, "ff"));
        let want = Term::map(
            Term::lam(Tgt, "$1", Term::app(Com, c(Com, "g"), Term::var(Com, "$1"))),
            c(Tgt, "ff"),
        );
        assert_eq!(got, want);
        assert_eq!(
            smart_ap(c(Tgt, "gf"), c(Tgt, "ff")),
            Term::ap(c(Tgt, "gf"), c(Tgt, "ff"))
        );
    }

    #[test]
    fn join_cases() {
        assert_eq!(smart_join(Term::pure(c(Com, "ff"))), c(Tgt, "ff"));
        let m = Term::map(c(Tgt, "f"), c(Tgt, "e"));
        assert_eq!(smart_join(m.clone()), Term::join(m));
        // nested collapses compose without introducing Join
        let nested = Term::pure(Term::app(Com, c(Com, "f"), Term::unt(Com)));
        assert!(!smart_join(nested).any(&|n| matches!(n.kind, Kind::Join(_))));
    }

    #[test]
    fn naive_is_raw() {
        let app = Term::app(Src, Term::var(Src, "f"), Term::var(Src, "x"));
        assert_eq!(
            naive_translate(&app),
            Term::ap(
                Term::pure(Term::var(Com, "f")),
                Term::pure(Term::var(Com, "x"))
            )
        );
        assert_eq!(
            naive_translate(&Term::each(c(Src, "ff"))),
            Term::join(Term::pure(c(Com, "ff")))
        );
    }

    fn fetch(l: Label, s: &str) -> Term {
        Term::app(l, c(l, "fetch"), Term::lit(l, s))
    }

    #[test]
    fn pair_golden() {
        let src = Term::prd(
            Src,
            Term::each(fetch(Src, "foo")),
            Term::each(fetch(Src, "bar")),
        );
        let pairer = Term::lam(
            Com,
            "a",
            Term::lam(
                Com,
                "b",
                Term::prd(Com, Term::var(Com, "a"), Term::var(Com, "b")),
            ),
        );
        let want = Term::ap(
            Term::map(
                Term::lam(Tgt, "x", Term::app(Com, pairer, Term::var(Com, "x"))),
                fetch(Tgt, "foo"),
            ),
            fetch(Tgt, "bar"),
        );
        assert!(alpha_eq(&translate(&src), &want));
    }

    #[test]
    fn seq_has_no_ap() {
        let src = Term::prd(
            Src,
            Term::each(fetch(Src, "foo")),
            Term::each(fetch(Src, "bar")),
        );
        let s = seq_translate(&src);
        assert!(!s.any(&|n| matches!(n.kind, Kind::Ap(..))));
        assert!(!s.any(&|n| matches!(n.kind, Kind::Each(_))));
    }

    #[test]
    fn fresh_names_avoid_existing() {
        let src = Term::app(
            Src,
            Term::lam(Src, "$1", Term::var(Com, "$1")),
            Term::each(c(Src, "ff")),
        );
        let t = translate(&src);
        let mut binders = vec![];
        t.walk(&mut |n| {
            if let Kind::Lam(x, _) = &n.kind {
                binders.push(x.clone())
            }
        });
        assert_eq!(binders.iter().filter(|x| *x == "$1").count(), 1);
    }
}
