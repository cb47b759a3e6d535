use thiserror::Error;

use super::{Pos, SExpr, SKind, SurfaceProgram};
use crate::ast::{assign_labels, Label, Signature, SignatureError, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ElabError {
    #[error("{pos}: effect mark `!` inside a function body; lambda bodies cannot run effects")]
    MarkUnderLambda { pos: Pos },
    #[error("{pos}: unbound name `{name}`")]
    UnboundName { name: String, pos: Pos },
    #[error(
        "{pos}: `let` body runs effects in a way the core calculus cannot express; \
         only `let x = e in b` with an unmarked `b`, or `let x = e in c!` with an unmarked `c`, \
         is supported. Hint: nest the marks instead, e.g. `f(g(a)!)!`"
    )]
    LetTooEffectful { pos: Pos },
    #[error("{pos}: combinator `{name}` is not part of the direct-style source language")]
    TargetSyntax { name: &'static str, pos: Pos },
    #[error("{pos}: effect mark `!` cannot appear in a combinator program")]
    MarkInTarget { pos: Pos },
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

/// Elaborates a direct-style program into a source-labeled core term.
pub fn elaborate(p: &SurfaceProgram) -> Result<(Signature, Term), ElabError> {
    let sig = signature(p)?;
    let t = Elab {
        sig: &sig,
        mode: Label::Src,
        scope: Vec::new(),
    }
    .term(&p.body, false)?;
    Ok((sig, assign_labels(&t, Label::Src)))
}

/// Elaborates a program written with the `pure`/`map`/`ap`/`join`
/// combinators (for instance the output of the translator) into a
/// target-labeled term.
pub fn elaborate_target(p: &SurfaceProgram) -> Result<(Signature, Term), ElabError> {
    let sig = signature(p)?;
    let t = Elab {
        sig: &sig,
        mode: Label::Tgt,
        scope: Vec::new(),
    }
    .term(&p.body, false)?;
    Ok((sig, assign_labels(&t, Label::Tgt)))
}

/// Picks [`elaborate_target`] when the body uses any combinator keyword,
/// [`elaborate`] otherwise.
pub fn elaborate_any(p: &SurfaceProgram) -> Result<(Signature, Term), ElabError> {
    if uses_combinators(&p.body) {
        elaborate_target(p)
    } else {
        elaborate(p)
    }
}

fn signature(p: &SurfaceProgram) -> Result<Signature, ElabError> {
    let mut sig = Signature::new();
    for d in &p.decls {
        sig.declare(&d.name, d.ty.clone(), d.kind)?;
    }
    Ok(sig)
}

fn children(e: &SExpr) -> Vec<&SExpr> {
    match &e.kind {
        SKind::Ident(_) | SKind::Unit | SKind::Str(_) => vec![],
        SKind::Ann(a, _)
        | SKind::Fun(_, a)
        | SKind::Bang(a)
        | SKind::Proj1(a)
        | SKind::Proj2(a)
        | SKind::Pure(a)
        | SKind::Join(a) => vec![a],
        SKind::Pair(a, b)
        | SKind::Let(_, a, b)
        | SKind::Concat(a, b)
        | SKind::App(a, b)
        | SKind::Map(a, b)
        | SKind::Ap(a, b) => vec![a, b],
    }
}

fn find_mark(e: &SExpr) -> Option<Pos> {
    if let SKind::Bang(_) = e.kind {
        return Some(e.pos);
    }
    children(e).into_iter().find_map(find_mark)
}

fn uses_combinators(e: &SExpr) -> bool {
    matches!(
        e.kind,
        SKind::Pure(_) | SKind::Map(..) | SKind::Ap(..) | SKind::Join(_)
    ) || children(e).into_iter().any(uses_combinators)
}

struct Elab<'a> {
    sig: &'a Signature,
    mode: Label,
    scope: Vec<String>,
}

impl Elab<'_> {
    fn bound(&mut self, x: &str, body: &SExpr) -> Result<Term, ElabError> {
        self.scope.push(x.to_string());
        let r = self.term(body, true);
        self.scope.pop();
        r
    }

    // Labels are placeholders here; `assign_labels` fixes them afterwards.
    fn term(&mut self, e: &SExpr, in_lambda: bool) -> Result<Term, ElabError> {
        const L: Label = Label::Src;
        let combinator = |name| -> Result<(), ElabError> {
            if self.mode == Label::Src {
                Err(ElabError::TargetSyntax { name, pos: e.pos })
            } else {
                Ok(())
            }
        };
        Ok(match &e.kind {
            SKind::Ident(x) => {
                if self.scope.iter().any(|y| y == x) {
                    Term::var(L, x)
                } else if self.sig.get(x).is_some() {
                    Term::constant(L, x)
                } else {
                    return Err(ElabError::UnboundName {
                        name: x.clone(),
                        pos: e.pos,
                    });
                }
            }
            SKind::Unit => Term::unt(L),
            SKind::Str(s) => Term::lit(L, s),
            SKind::Pair(a, b) => Term::prd(L, self.term(a, in_lambda)?, self.term(b, in_lambda)?),
            SKind::Ann(a, t) => self.term(a, in_lambda)?.with_ty(t.clone()),
            SKind::Fun(x, b) => Term::lam(L, x, self.bound(x, b)?),
            SKind::Let(x, bound, body) => {
                let arg = self.term(bound, in_lambda)?;
                match find_mark(body) {
                    None => Term::app(L, Term::lam(L, x, self.bound(x, body)?), arg),
                    Some(pos) if in_lambda => return Err(ElabError::MarkUnderLambda { pos }),
                    Some(_) => match &body.kind {
                        SKind::Bang(inner) if find_mark(inner).is_none() => {
                            if self.mode != Label::Src {
                                return Err(ElabError::MarkInTarget { pos: body.pos });
                            }
                            Term::each(Term::app(L, Term::lam(L, x, self.bound(x, inner)?), arg))
                        }
                        _ => return Err(ElabError::LetTooEffectful { pos: e.pos }),
                    },
                }
            }
            SKind::Concat(a, b) => {
                if self.sig.get("concat").is_none() || self.scope.iter().any(|y| y == "concat") {
                    return Err(ElabError::UnboundName {
                        name: "concat".into(),
                        pos: e.pos,
                    });
                }
                let a = self.term(a, in_lambda)?;
                let b = self.term(b, in_lambda)?;
                Term::app(L, Term::app(L, Term::constant(L, "concat"), a), b)
            }
            SKind::App(f, a) => Term::app(L, self.term(f, in_lambda)?, self.term(a, in_lambda)?),
            SKind::Bang(a) => {
                if in_lambda {
                    return Err(ElabError::MarkUnderLambda { pos: e.pos });
                }
                if self.mode != Label::Src {
                    return Err(ElabError::MarkInTarget { pos: e.pos });
                }
                Term::each(self.term(a, in_lambda)?)
            }
            SKind::Proj1(a) => Term::fst(L, self.term(a, in_lambda)?),
            SKind::Proj2(a) => Term::snd(L, self.term(a, in_lambda)?),
            SKind::Pure(a) => {
                combinator("pure")?;
                Term::pure(self.term(a, in_lambda)?)
            }
            SKind::Join(a) => {
                combinator("join")?;
                Term::join(self.term(a, in_lambda)?)
            }
            SKind::Map(f, a) => {
                combinator("map")?;
                Term::map(self.term(f, in_lambda)?, self.term(a, in_lambda)?)
            }
            SKind::Ap(f, a) => {
                combinator("ap")?;
                Term::ap(self.term(f, in_lambda)?, self.term(a, in_lambda)?)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{alpha_eq, Kind, Label::*, Ty};
    use crate::surface::parse;

    const DECLS: &str =
        "effect f : Str -> Eff Str\neffect g : Str -> Eff Str\nprim concat : Str -> Str -> Str\n";

    fn elab(body: &str) -> Result<Term, ElabError> {
        let p = parse(&format!("{DECLS}purify {{ {body} }}")).unwrap();
        elaborate(&p).map(|(_, t)| t)
    }

    #[test]
    fn single_mark() {
        let t = elab("f(\"a\")!").unwrap();
        let want = Term::each(Term::app(
            Src,
            Term::constant(Src, "f"),
            Term::lit(Src, "a"),
        ));
        assert!(alpha_eq(&t, &want));
        assert!(!t.any(&|n| n.is_combinator()));
    }

    #[test]
    fn let_with_marked_continuation() {
        let t = elab("let x = \"a\" in f(x)!").unwrap();
        let want = Term::each(Term::app(
            Src,
            Term::lam(
                Src,
                "x",
                Term::app(Com, Term::constant(Com, "f"), Term::var(Com, "x")),
            ),
            Term::lit(Src, "a"),
        ));
        assert!(alpha_eq(&t, &want), "{t:?}");
    }

    #[test]
    fn let_with_pure_continuation() {
        let t = elab("let x = f(\"a\")! in x ++ x").unwrap();
        assert!(matches!(&t.kind, Kind::App(l, _) if matches!(l.kind, Kind::Lam(..))));
    }

    #[test]
    fn rejections() {
        assert!(matches!(
            elab("fun y -> g(y)!"),
            Err(ElabError::MarkUnderLambda { .. })
        ));
        assert!(matches!(
            elab("let x = \"a\" in (f(x)!, g(x)!)"),
            Err(ElabError::LetTooEffectful { .. })
        ));
        assert!(matches!(
            elab("h(\"a\")"),
            Err(ElabError::UnboundName { .. })
        ));
        assert!(matches!(
            elab("pure ()"),
            Err(ElabError::TargetSyntax { name: "pure", .. })
        ));
    }

    #[test]
    fn shadowing_and_annotation() {
        let t = elab("(fun f -> f : Str -> Str)(\"a\")").unwrap();
        match &t.kind {
            Kind::App(l, _) => {
                assert_eq!(l.ty, Some(Ty::arrow(Ty::Str, Ty::Str)));
                match &l.kind {
                    Kind::Lam(_, b) => assert_eq!(b.kind, Kind::Var("f".into())),
                    _ => panic!(),
                }
            }
            _ => panic!(),
        }
    }

    #[test]
    fn target_programs() {
        let p = parse(&format!(
            "{DECLS}purify {{ map (fun x -> f(x)) (pure \"a\") }}"
        ))
        .unwrap();
        let (_, t) = elaborate_any(&p).unwrap();
        assert_eq!(t.label, Tgt);
        assert!(t.any(&|n| n.is_combinator()));
        let p = parse(&format!("{DECLS}purify {{ pure f(\"a\")! }}")).unwrap();
        assert!(matches!(
            elaborate_any(&p),
            Err(ElabError::MarkInTarget { .. })
        ));
    }
}
