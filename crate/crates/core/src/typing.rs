//! Label discipline and type assignment.
//!
//! Lambda parameters are unannotated, so their types are solved by
//! first-order unification. A pre-existing `ty` on a node is treated as an
//! annotation. Any type left unsolved is reported as ambiguous.

use thiserror::Error;

use crate::ast::{Kind, Label, Signature, Term, Ty};
use crate::pretty::pretty;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("`{node}` is labeled {found} but {required} is required here")]
    LabelMismatch {
        node: String,
        found: Label,
        required: Label,
    },
    #[error("`{node}` has type {found} but {expected} was expected")]
    TypeMismatch {
        node: String,
        found: String,
        expected: String,
    },
    #[error("unbound variable `{0}`")]
    UnboundVar(String),
    #[error("unknown constant `{0}`")]
    UnknownConst(String),
    #[error("cannot determine the type of `{node}`; add an annotation `(e : T)`")]
    AmbiguousType { node: String },
}

/// How lambda bodies are labeled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Discipline {
    /// Lambda bodies are always common.
    #[default]
    Strict,
    /// Target-labeled lambdas may also have target bodies, i.e. build
    /// effect descriptions with combinators. The sequential baseline and
    /// the associativity rewrite of the normalizer produce such terms.
    Relaxed,
}

#[derive(Clone, Debug, Default)]
pub struct TypeEnv {
    vars: Vec<(String, Ty)>,
    pub sig: Signature,
    pub discipline: Discipline,
}

impl TypeEnv {
    pub fn new(sig: Signature) -> TypeEnv {
        TypeEnv {
            vars: Vec::new(),
            sig,
            discipline: Discipline::Strict,
        }
    }

    pub fn relaxed(mut self) -> TypeEnv {
        self.discipline = Discipline::Relaxed;
        self
    }

    /// Adds a binding; later bindings shadow earlier ones.
    pub fn bind(mut self, name: impl Into<String>, ty: Ty) -> TypeEnv {
        self.vars.push((name.into(), ty));
        self
    }
}

/// Returns the type of `e` checked at `expected_label`.
pub fn typecheck(e: &Term, expected_label: Label, env: &TypeEnv) -> Result<Ty, TypeError> {
    let stamped = stamp(e, expected_label, env)?;
    Ok(stamped.ty.expect("stamped"))
}

/// Checks `e` and returns a copy with every node's `ty` filled in.
pub fn stamp(e: &Term, expected_label: Label, env: &TypeEnv) -> Result<Term, TypeError> {
    let mut cx = Checker {
        subst: Vec::new(),
        scope: Vec::new(),
        env,
    };
    for (x, t) in &env.vars {
        let m = MTy::from_ty(t);
        cx.scope.push((x.clone(), m));
    }
    let mut node_tys = Vec::new();
    cx.infer(e, expected_label, &mut node_tys)?;
    let mut out = e.clone();
    let mut it = node_tys.into_iter();
    let mut err = None;
    fn fill(
        t: &mut Term,
        it: &mut impl Iterator<Item = MTy>,
        cx: &Checker,
        err: &mut Option<TypeError>,
    ) {
        let m = it.next().expect("one type per node");
        match cx.resolve(&m).to_ty() {
            Some(ty) => t.ty = Some(ty),
            None => {
                if err.is_none() {
                    *err = Some(TypeError::AmbiguousType { node: snippet(t) });
                }
            }
        }
        for c in t.children_mut() {
            fill(c, it, cx, err);
        }
    }
    fill(&mut out, &mut it, &cx, &mut err);
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

fn snippet(t: &Term) -> String {
    let s = pretty(t);
    if s.chars().count() > 60 {
        let cut: String = s.chars().take(57).collect();
        format!("{cut}...")
    } else {
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
enum MTy {
    Unit,
    Str,
    Prod(Box<MTy>, Box<MTy>),
    Arrow(Box<MTy>, Box<MTy>),
    Eff(Box<MTy>),
    Meta(usize),
}

impl MTy {
    fn from_ty(t: &Ty) -> MTy {
        match t {
            Ty::Unit => MTy::Unit,
            Ty::Str => MTy::Str,
            Ty::Prod(a, b) => MTy::Prod(Box::new(MTy::from_ty(a)), Box::new(MTy::from_ty(b))),
            Ty::Arrow(a, b) => MTy::Arrow(Box::new(MTy::from_ty(a)), Box::new(MTy::from_ty(b))),
            Ty::Eff(a) => MTy::Eff(Box::new(MTy::from_ty(a))),
        }
    }

    fn to_ty(&self) -> Option<Ty> {
        Some(match self {
            MTy::Unit => Ty::Unit,
            MTy::Str => Ty::Str,
            MTy::Prod(a, b) => Ty::prod(a.to_ty()?, b.to_ty()?),
            MTy::Arrow(a, b) => Ty::arrow(a.to_ty()?, b.to_ty()?),
            MTy::Eff(a) => Ty::eff(a.to_ty()?),
            MTy::Meta(_) => return None,
        })
    }

    fn render(&self) -> String {
        match self.to_ty() {
            Some(t) => t.to_string(),
            None => match self {
                MTy::Meta(i) => format!("?{i}"),
                MTy::Prod(a, b) => format!("({}, {})", a.render(), b.render()),
                MTy::Arrow(a, b) => format!("({}) -> {}", a.render(), b.render()),
                MTy::Eff(a) => format!("Eff ({})", a.render()),
                _ => unreachable!(),
            },
        }
    }
}

struct Checker<'a> {
    subst: Vec<Option<MTy>>,
    scope: Vec<(String, MTy)>,
    env: &'a TypeEnv,
}

impl Checker<'_> {
    fn fresh(&mut self) -> MTy {
        self.subst.push(None);
        MTy::Meta(self.subst.len() - 1)
    }

    fn resolve(&self, t: &MTy) -> MTy {
        match t {
            MTy::Meta(i) => match &self.subst[*i] {
                Some(u) => self.resolve(u),
                None => t.clone(),
            },
            MTy::Prod(a, b) => MTy::Prod(Box::new(self.resolve(a)), Box::new(self.resolve(b))),
            MTy::Arrow(a, b) => MTy::Arrow(Box::new(self.resolve(a)), Box::new(self.resolve(b))),
            MTy::Eff(a) => MTy::Eff(Box::new(self.resolve(a))),
            _ => t.clone(),
        }
    }

    fn occurs(&self, i: usize, t: &MTy) -> bool {
        match self.resolve(t) {
            MTy::Meta(j) => i == j,
            MTy::Prod(a, b) | MTy::Arrow(a, b) => self.occurs(i, &a) || self.occurs(i, &b),
            MTy::Eff(a) => self.occurs(i, &a),
            _ => false,
        }
    }

    fn unify_inner(&mut self, a: &MTy, b: &MTy) -> bool {
        let (a, b) = (self.shallow(a), self.shallow(b));
        match (&a, &b) {
            (MTy::Meta(i), MTy::Meta(j)) if i == j => true,
            (MTy::Meta(i), t) | (t, MTy::Meta(i)) => {
                if self.occurs(*i, t) {
                    return false;
                }
                self.subst[*i] = Some(t.clone());
                true
            }
            (MTy::Unit, MTy::Unit) | (MTy::Str, MTy::Str) => true,
            (MTy::Prod(a1, a2), MTy::Prod(b1, b2)) | (MTy::Arrow(a1, a2), MTy::Arrow(b1, b2)) => {
                self.unify_inner(a1, b1) && self.unify_inner(a2, b2)
            }
            (MTy::Eff(x), MTy::Eff(y)) => self.unify_inner(x, y),
            _ => false,
        }
    }

    fn shallow(&self, t: &MTy) -> MTy {
        match t {
            MTy::Meta(i) => match &self.subst[*i] {
                Some(u) => self.shallow(u),
                None => t.clone(),
            },
            _ => t.clone(),
        }
    }

    /// Unifies `found` with `expected`, blaming `node` on failure.
    fn unify(&mut self, node: &Term, found: &MTy, expected: &MTy) -> Result<(), TypeError> {
        if self.unify_inner(found, expected) {
            Ok(())
        } else {
            Err(TypeError::TypeMismatch {
                node: snippet(node),
                found: self.resolve(found).render(),
                expected: self.resolve(expected).render(),
            })
        }
    }

    fn require(e: &Term, label: Label) -> Result<(), TypeError> {
        if e.label == label {
            Ok(())
        } else {
            Err(TypeError::LabelMismatch {
                node: snippet(e),
                found: e.label,
                required: label,
            })
        }
    }

    /// Only at `allowed`; reports the position's label otherwise.
    fn only_at(e: &Term, at: Label, allowed: Label) -> Result<(), TypeError> {
        if at == allowed {
            Ok(())
        } else {
            Err(TypeError::LabelMismatch {
                node: snippet(e),
                found: at,
                required: allowed,
            })
        }
    }

    /// Infers `e` at `label`, pushing node types in pre-order into `out`.
    fn infer(&mut self, e: &Term, label: Label, out: &mut Vec<MTy>) -> Result<MTy, TypeError> {
        Self::require(e, label)?;
        let slot = out.len();
        out.push(MTy::Unit);
        let t = match &e.kind {
            Kind::Var(x) => match self.scope.iter().rev().find(|(y, _)| y == x) {
                Some((_, t)) => t.clone(),
                None => return Err(TypeError::UnboundVar(x.clone())),
            },
            Kind::Const(c) => match self.env.sig.get(c) {
                Some(d) => MTy::from_ty(&d.ty),
                None => return Err(TypeError::UnknownConst(c.clone())),
            },
            Kind::Unt => MTy::Unit,
            Kind::Lit(_) => MTy::Str,
            Kind::Prd(a, b) => {
                let ta = self.infer(a, label, out)?;
                let tb = self.infer(b, label, out)?;
                MTy::Prod(Box::new(ta), Box::new(tb))
            }
            Kind::Fst(p) | Kind::Snd(p) => {
                let tp = self.infer(p, label, out)?;
                let (l, r) = (self.fresh(), self.fresh());
                self.unify(p, &tp, &MTy::Prod(Box::new(l.clone()), Box::new(r.clone())))?;
                if matches!(e.kind, Kind::Fst(_)) {
                    l
                } else {
                    r
                }
            }
            Kind::App(f, a) => {
                let tf = self.infer(f, label, out)?;
                let ta = self.infer(a, label, out)?;
                let r = self.fresh();
                self.unify(f, &tf, &MTy::Arrow(Box::new(ta), Box::new(r.clone())))?;
                r
            }
            Kind::Lam(x, body) => {
                let body_label = if self.env.discipline == Discipline::Relaxed
                    && label == Label::Tgt
                    && body.label == Label::Tgt
                {
                    Label::Tgt
                } else {
                    Label::Com
                };
                let a = match &e.ty {
                    Some(Ty::Arrow(a, _)) => MTy::from_ty(a),
                    _ => self.fresh(),
                };
                self.scope.push((x.clone(), a.clone()));
                let r = self.infer(body, body_label, out);
                self.scope.pop();
                MTy::Arrow(Box::new(a), Box::new(r?))
            }
            Kind::Each(inner) => {
                Self::only_at(e, label, Label::Src)?;
                let t = self.infer(inner, Label::Src, out)?;
                let r = self.fresh();
                self.unify(inner, &t, &MTy::Eff(Box::new(r.clone())))?;
                r
            }
            Kind::Pure(inner) => {
                Self::only_at(e, label, Label::Tgt)?;
                let t = self.infer(inner, Label::Com, out)?;
                MTy::Eff(Box::new(t))
            }
            Kind::Join(inner) => {
                Self::only_at(e, label, Label::Tgt)?;
                let t = self.infer(inner, Label::Tgt, out)?;
                let r = self.fresh();
                let want = MTy::Eff(Box::new(MTy::Eff(Box::new(r.clone()))));
                self.unify(inner, &t, &want)?;
                MTy::Eff(Box::new(r))
            }
            Kind::Map(f, x) => {
                Self::only_at(e, label, Label::Tgt)?;
                let tf = self.infer(f, Label::Tgt, out)?;
                let tx = self.infer(x, Label::Tgt, out)?;
                let (s, t) = (self.fresh(), self.fresh());
                self.unify(x, &tx, &MTy::Eff(Box::new(s.clone())))?;
                self.unify(f, &tf, &MTy::Arrow(Box::new(s), Box::new(t.clone())))?;
                MTy::Eff(Box::new(t))
            }
            Kind::Ap(f, x) => {
                Self::only_at(e, label, Label::Tgt)?;
                let tf = self.infer(f, Label::Tgt, out)?;
                let tx = self.infer(x, Label::Tgt, out)?;
                let (s, t) = (self.fresh(), self.fresh());
                self.unify(x, &tx, &MTy::Eff(Box::new(s.clone())))?;
                let want = MTy::Eff(Box::new(MTy::Arrow(Box::new(s), Box::new(t.clone()))));
                self.unify(f, &tf, &want)?;
                MTy::Eff(Box::new(t))
            }
        };
        if let Some(ann) = &e.ty {
            self.unify(e, &t, &MTy::from_ty(ann))?;
        }
        out[slot] = t.clone();
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{ConstKind, Label::*};

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.declare("fetchFoo", Ty::eff(Ty::Str), ConstKind::Effectful)
            .unwrap();
        s.declare(
            "fetch",
            Ty::arrow(Ty::Str, Ty::eff(Ty::Str)),
            ConstKind::Effectful,
        )
        .unwrap();
        s
    }

    #[test]
    fn fst_of_pair_at_common() {
        let e = Term::fst(Com, Term::prd(Com, Term::unt(Com), Term::unt(Com)));
        assert_eq!(typecheck(&e, Com, &TypeEnv::default()), Ok(Ty::Unit));
    }

    #[test]
    fn each_eliminates_one_layer() {
        let env = TypeEnv::new(sig());
        let e = Term::each(Term::constant(Src, "fetchFoo"));
        assert_eq!(typecheck(&e, Src, &env), Ok(Ty::Str));
    }

    #[test]
    fn each_is_source_only() {
        let env = TypeEnv::new(sig());
        let mut e = Term::each(Term::constant(Src, "fetchFoo"));
        e.label = Tgt;
        if let Kind::Each(c) = &mut e.kind {
            c.label = Tgt;
        }
        assert!(matches!(
            typecheck(&e, Tgt, &env),
            Err(TypeError::LabelMismatch {
                found: Tgt,
                required: Src,
                ..
            })
        ));
    }

    #[test]
    fn lambda_params_solved_from_use() {
        let env = TypeEnv::new(sig());
        let e = Term::map(
            Term::lam(
                Tgt,
                "x",
                Term::app(Com, Term::constant(Com, "fetch"), Term::var(Com, "x")),
            ),
            Term::pure(Term::lit(Com, "a")),
        );
        assert_eq!(typecheck(&e, Tgt, &env), Ok(Ty::eff(Ty::eff(Ty::Str))));
        let s = stamp(&e, Tgt, &env).unwrap();
        let mut all = true;
        s.walk(&mut |n| all &= n.ty.is_some());
        assert!(all);
    }

    #[test]
    fn ambiguity_and_annotations() {
        let id = Term::lam(Com, "x", Term::var(Com, "x"));
        assert!(matches!(
            typecheck(&id, Com, &TypeEnv::default()),
            Err(TypeError::AmbiguousType { .. })
        ));
        let ann = id.clone().with_ty(Ty::arrow(Ty::Str, Ty::Str));
        assert_eq!(
            typecheck(&ann, Com, &TypeEnv::default()),
            Ok(Ty::arrow(Ty::Str, Ty::Str))
        );
        let bad = Term::unt(Com).with_ty(Ty::Str);
        assert!(matches!(
            typecheck(&bad, Com, &TypeEnv::default()),
            Err(TypeError::TypeMismatch { .. })
        ));
    }

    #[test]
    fn scoping_errors() {
        assert_eq!(
            typecheck(&Term::var(Com, "y"), Com, &TypeEnv::default()),
            Err(TypeError::UnboundVar("y".into()))
        );
        assert_eq!(
            typecheck(&Term::constant(Com, "nope"), Com, &TypeEnv::default()),
            Err(TypeError::UnknownConst("nope".into()))
        );
        let env = TypeEnv::default().bind("y", Ty::Unit).bind("y", Ty::Str);
        assert_eq!(typecheck(&Term::var(Com, "y"), Com, &env), Ok(Ty::Str));
    }

    #[test]
    fn lambda_bodies_are_common_unless_relaxed() {
        let body = Term::pure(Term::var(Com, "x"));
        let lam = Term::lam(Tgt, "x", body).with_ty(Ty::arrow(Ty::Str, Ty::eff(Ty::Str)));
        assert!(matches!(
            typecheck(&lam, Tgt, &TypeEnv::default()),
            Err(TypeError::LabelMismatch { .. })
        ));
        assert_eq!(
            typecheck(&lam, Tgt, &TypeEnv::default().relaxed()),
            Ok(Ty::arrow(Ty::Str, Ty::eff(Ty::Str)))
        );
    }

    #[test]
    fn self_application_is_rejected() {
        let e = Term::lam(
            Com,
            "x",
            Term::app(Com, Term::var(Com, "x"), Term::var(Com, "x")),
        );
        assert!(matches!(
            typecheck(&e, Com, &TypeEnv::default()),
            Err(TypeError::TypeMismatch { .. })
        ));
    }
}
