//! Guest types, fragment labels, terms and constant signatures.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Identifiers starting with this character are reserved for names invented
/// by the translator. User declarations may not use it.
pub const FRESH_PREFIX: char = '$';

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ty {
    Unit,
    Str,
    Prod(Box<Ty>, Box<Ty>),
    Arrow(Box<Ty>, Box<Ty>),
    Eff(Box<Ty>),
}

impl Ty {
    pub fn prod(a: Ty, b: Ty) -> Ty {
        Ty::Prod(Box::new(a), Box::new(b))
    }

    pub fn arrow(a: Ty, b: Ty) -> Ty {
        Ty::Arrow(Box::new(a), Box::new(b))
    }

    pub fn eff(a: Ty) -> Ty {
        Ty::Eff(Box::new(a))
    }

    pub fn is_eff(&self) -> bool {
        matches!(self, Ty::Eff(_))
    }

    /// Strips arrows: `A -> B -> C` yields `C`.
    pub fn final_codomain(&self) -> &Ty {
        match self {
            Ty::Arrow(_, b) => b.final_codomain(),
            t => t,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, arrow_lhs: bool) -> fmt::Result {
        match self {
            Ty::Unit => write!(f, "Unit"),
            Ty::Str => write!(f, "Str"),
            Ty::Prod(a, b) => write!(f, "({a}, {b})"),
            Ty::Eff(a) => match **a {
                Ty::Arrow(..) | Ty::Eff(_) => write!(f, "Eff ({a})"),
                _ => write!(f, "Eff {a}"),
            },
            Ty::Arrow(a, b) => {
                if arrow_lhs {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, true)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, false)?;
                if arrow_lhs {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}

/// Which fragment of the language a node belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    /// Direct style: evaluation implicitly runs in the monad.
    Src,
    /// Explicit combinators.
    Tgt,
    /// Effect-free terms shared by both.
    Com,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Src => "src",
            Label::Tgt => "tgt",
            Label::Com => "com",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub label: Label,
    /// Filled in by the checker. A type present before checking acts as an
    /// annotation the checker must agree with.
    pub ty: Option<Ty>,
    pub kind: Kind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Kind {
    Var(String),
    Const(String),
    Unt,
    Lit(String),
    Prd(Box<Term>, Box<Term>),
    Fst(Box<Term>),
    Snd(Box<Term>),
    App(Box<Term>, Box<Term>),
    Lam(String, Box<Term>),
    Each(Box<Term>),
    Pure(Box<Term>),
    Map(Box<Term>, Box<Term>),
    Ap(Box<Term>, Box<Term>),
    Join(Box<Term>),
}

impl Term {
    pub fn new(label: Label, kind: Kind) -> Term {
        Term {
            label,
            ty: None,
            kind,
        }
    }

    pub fn with_ty(mut self, ty: Ty) -> Term {
        self.ty = Some(ty);
        self
    }

    pub fn var(label: Label, name: impl Into<String>) -> Term {
        Term::new(label, Kind::Var(name.into()))
    }

    pub fn constant(label: Label, name: impl Into<String>) -> Term {
        Term::new(label, Kind::Const(name.into()))
    }

    pub fn unt(label: Label) -> Term {
        Term::new(label, Kind::Unt)
    }

    pub fn lit(label: Label, s: impl Into<String>) -> Term {
        Term::new(label, Kind::Lit(s.into()))
    }

    pub fn prd(label: Label, a: Term, b: Term) -> Term {
        Term::new(label, Kind::Prd(Box::new(a), Box::new(b)))
    }

    pub fn fst(label: Label, p: Term) -> Term {
        Term::new(label, Kind::Fst(Box::new(p)))
    }

    pub fn snd(label: Label, p: Term) -> Term {
        Term::new(label, Kind::Snd(Box::new(p)))
    }

    pub fn app(label: Label, f: Term, a: Term) -> Term {
        Term::new(label, Kind::App(Box::new(f), Box::new(a)))
    }

    pub fn lam(label: Label, param: impl Into<String>, body: Term) -> Term {
        Term::new(label, Kind::Lam(param.into(), Box::new(body)))
    }

    pub fn each(e: Term) -> Term {
        Term::new(Label::Src, Kind::Each(Box::new(e)))
    }

    pub fn pure(e: Term) -> Term {
        Term::new(Label::Tgt, Kind::Pure(Box::new(e)))
    }

    pub fn map(f: Term, e: Term) -> Term {
        Term::new(Label::Tgt, Kind::Map(Box::new(f), Box::new(e)))
    }

    pub fn ap(f: Term, e: Term) -> Term {
        Term::new(Label::Tgt, Kind::Ap(Box::new(f), Box::new(e)))
    }

    pub fn join(e: Term) -> Term {
        Term::new(Label::Tgt, Kind::Join(Box::new(e)))
    }

    pub fn children(&self) -> Vec<&Term> {
        match &self.kind {
            Kind::Var(_) | Kind::Const(_) | Kind::Unt | Kind::Lit(_) => vec![],
            Kind::Fst(a)
            | Kind::Snd(a)
            | Kind::Lam(_, a)
            | Kind::Each(a)
            | Kind::Pure(a)
            | Kind::Join(a) => vec![a],
            Kind::Prd(a, b) | Kind::App(a, b) | Kind::Map(a, b) | Kind::Ap(a, b) => vec![a, b],
        }
    }

    pub fn children_mut(&mut self) -> Vec<&mut Term> {
        match &mut self.kind {
            Kind::Var(_) | Kind::Const(_) | Kind::Unt | Kind::Lit(_) => vec![],
            Kind::Fst(a)
            | Kind::Snd(a)
            | Kind::Lam(_, a)
            | Kind::Each(a)
            | Kind::Pure(a)
            | Kind::Join(a) => vec![a],
            Kind::Prd(a, b) | Kind::App(a, b) | Kind::Map(a, b) | Kind::Ap(a, b) => vec![a, b],
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Term::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Term::depth)
            .max()
            .unwrap_or(0)
    }

    pub fn is_combinator(&self) -> bool {
        matches!(
            self.kind,
            Kind::Pure(_) | Kind::Map(..) | Kind::Ap(..) | Kind::Join(_)
        )
    }

    /// Pre-order walk.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn any(&self, pred: &impl Fn(&Term) -> bool) -> bool {
        pred(self) || self.children().into_iter().any(|c| c.any(pred))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(t: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match &t.kind {
                Kind::Var(x) => {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                }
                Kind::Lam(x, b) => {
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                _ => {
                    for c in t.children() {
                        go(c, bound, out);
                    }
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Clears every `ty` stamp.
    pub fn erase_types(&self) -> Term {
        let mut t = self.clone();
        fn go(t: &mut Term) {
            t.ty = None;
            for c in t.children_mut() {
                go(c);
            }
        }
        go(&mut t);
        t
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstKind {
    Pure,
    Effectful,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstDecl {
    pub name: String,
    pub ty: Ty,
    pub kind: ConstKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
    #[error("`{0}` uses the reserved prefix `{FRESH_PREFIX}`")]
    Reserved(String),
    #[error("effect `{name}` must have a type ending in `Eff _`, found `{ty}`")]
    NotEffectful { name: String, ty: Ty },
}

/// Ordered table of declared constants.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    consts: Vec<ConstDecl>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn declare(&mut self, name: &str, ty: Ty, kind: ConstKind) -> Result<(), SignatureError> {
        if name.starts_with(FRESH_PREFIX) {
            return Err(SignatureError::Reserved(name.to_string()));
        }
        if self.get(name).is_some() {
            return Err(SignatureError::Duplicate(name.to_string()));
        }
        if kind == ConstKind::Effectful && !ty.final_codomain().is_eff() {
            return Err(SignatureError::NotEffectful {
                name: name.to_string(),
                ty,
            });
        }
        self.consts.push(ConstDecl {
            name: name.to_string(),
            ty,
            kind,
        });
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&ConstDecl> {
        self.consts.iter().find(|c| c.name == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ConstDecl> {
        self.consts.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.consts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.consts.len()
    }

    /// The signature used by the property suites: a handful of effects of
    /// varied shapes plus a few pure primitives.
    pub fn standard() -> Signature {
        let s = || Ty::Str;
        let mut sig = Signature::new();
        let decls = [
            ("fetch", Ty::arrow(s(), Ty::eff(s())), ConstKind::Effectful),
            ("ask", Ty::eff(s()), ConstKind::Effectful),
            ("tick", Ty::eff(Ty::Unit), ConstKind::Effectful),
            (
                "nest",
                Ty::arrow(s(), Ty::eff(Ty::eff(s()))),
                ConstKind::Effectful,
            ),
            ("getf", Ty::eff(Ty::arrow(s(), s())), ConstKind::Effectful),
            (
                "both",
                Ty::arrow(s(), Ty::arrow(s(), Ty::eff(Ty::prod(s(), Ty::Unit)))),
                ConstKind::Effectful,
            ),
            (
                "concat",
                Ty::arrow(s(), Ty::arrow(s(), s())),
                ConstKind::Pure,
            ),
            ("hello", s(), ConstKind::Pure),
            ("dup", Ty::arrow(s(), Ty::prod(s(), s())), ConstKind::Pure),
        ];
        for (n, t, k) in decls {
            sig.declare(n, t, k)
                .expect("standard signature is well formed");
        }
        sig
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelabelError {
    #[error("term is not in the common fragment: found a `{found}` node")]
    NotCommon { found: Label },
}

/// Embeds a common term into another fragment. Lambda bodies stay common,
/// since a lambda body is always checked in the common fragment.
pub fn relabel(e: &Term, target: Label) -> Result<Term, RelabelError> {
    let mut bad = None;
    spine(e, &mut |t| {
        if t.label != Label::Com && bad.is_none() {
            bad = Some(t.label);
        }
    });
    if let Some(found) = bad {
        return Err(RelabelError::NotCommon { found });
    }
    Ok(restamp_spine(e, target))
}

/// Visits the nodes of `e` that share its root label: everything except
/// the insides of lambda bodies and of fragment-changing combinators.
fn spine<'a>(e: &'a Term, f: &mut impl FnMut(&'a Term)) {
    f(e);
    match &e.kind {
        Kind::Lam(..) | Kind::Each(_) | Kind::Pure(_) => {}
        _ => {
            for c in e.children() {
                spine(c, f);
            }
        }
    }
}

/// Replaces the label on the root spine without validation.
pub(crate) fn restamp_spine(e: &Term, target: Label) -> Term {
    let mut t = e.clone();
    fn go(t: &mut Term, target: Label) {
        t.label = target;
        match &mut t.kind {
            Kind::Lam(..) | Kind::Each(_) | Kind::Pure(_) => {}
            _ => {
                for c in t.children_mut() {
                    go(c, target);
                }
            }
        }
    }
    go(&mut t, target);
    t
}

/// Assigns labels from structure alone: the root gets `root`, and each
/// constructor fixes the labels of its children. A lambda body that
/// contains target combinators on its own spine is labeled `Tgt`.
pub fn assign_labels(e: &Term, root: Label) -> Term {
    let mut t = e.clone();
    fn body_label(b: &Term) -> Label {
        let mut tgt = false;
        spine(b, &mut |n| tgt |= n.is_combinator());
        if tgt {
            Label::Tgt
        } else {
            Label::Com
        }
    }
    fn go(t: &mut Term, l: Label) {
        t.label = l;
        match &mut t.kind {
            Kind::Var(_) | Kind::Const(_) | Kind::Unt | Kind::Lit(_) => {}
            Kind::Prd(a, b) | Kind::App(a, b) => {
                go(a, l);
                go(b, l);
            }
            Kind::Fst(a) | Kind::Snd(a) => go(a, l),
            Kind::Lam(_, b) => {
                let bl = body_label(b);
                go(b, bl);
            }
            Kind::Each(a) => go(a, Label::Src),
            Kind::Pure(a) => go(a, Label::Com),
            Kind::Map(a, b) | Kind::Ap(a, b) => {
                go(a, Label::Tgt);
                go(b, Label::Tgt);
            }
            Kind::Join(a) => go(a, Label::Tgt),
        }
    }
    go(&mut t, root);
    t
}

/// True iff the term contains neither `Each` nor `Join`.
pub fn is_effect_free(e: &Term) -> bool {
    !e.any(&|t| matches!(t.kind, Kind::Each(_) | Kind::Join(_)))
}

/// Equality up to consistent renaming of bound variables. Labels and
/// constants are compared exactly; type stamps are ignored.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    fn lookup(env: &[String], x: &str) -> Option<usize> {
        env.iter().rev().position(|y| y == x)
    }
    fn go(a: &Term, b: &Term, ea: &mut Vec<String>, eb: &mut Vec<String>) -> bool {
        if a.label != b.label {
            return false;
        }
        match (&a.kind, &b.kind) {
            (Kind::Var(x), Kind::Var(y)) => match (lookup(ea, x), lookup(eb, y)) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            },
            (Kind::Const(x), Kind::Const(y)) => x == y,
            (Kind::Unt, Kind::Unt) => true,
            (Kind::Lit(x), Kind::Lit(y)) => x == y,
            (Kind::Lam(x, ba), Kind::Lam(y, bb)) => {
                ea.push(x.clone());
                eb.push(y.clone());
                let r = go(ba, bb, ea, eb);
                ea.pop();
                eb.pop();
                r
            }
            (Kind::Prd(a1, a2), Kind::Prd(b1, b2))
            | (Kind::App(a1, a2), Kind::App(b1, b2))
            | (Kind::Map(a1, a2), Kind::Map(b1, b2))
            | (Kind::Ap(a1, a2), Kind::Ap(b1, b2)) => go(a1, b1, ea, eb) && go(a2, b2, ea, eb),
            (Kind::Fst(x), Kind::Fst(y))
            | (Kind::Snd(x), Kind::Snd(y))
            | (Kind::Each(x), Kind::Each(y))
            | (Kind::Pure(x), Kind::Pure(y))
            | (Kind::Join(x), Kind::Join(y)) => go(x, y, ea, eb),
            _ => false,
        }
    }
    go(a, b, &mut Vec::new(), &mut Vec::new())
}

/// Supply of reserved names `$1`, `$2`, ... that do not clash with any
/// reserved name already present in the given terms.
#[derive(Clone, Debug)]
pub struct Fresh {
    next: u64,
}

impl Fresh {
    pub fn above(terms: &[&Term]) -> Fresh {
        let mut max = 0;
        for t in terms {
            t.walk(&mut |n| {
                let name = match &n.kind {
                    Kind::Var(x) | Kind::Lam(x, _) => x,
                    _ => return,
                };
                if let Some(k) = name
                    .strip_prefix(FRESH_PREFIX)
                    .and_then(|d| d.parse::<u64>().ok())
                {
                    max = max.max(k);
                }
            });
        }
        Fresh { next: max + 1 }
    }

    pub fn name(&mut self) -> String {
        let n = format!("{FRESH_PREFIX}{}", self.next);
        self.next += 1;
        n
    }
}
