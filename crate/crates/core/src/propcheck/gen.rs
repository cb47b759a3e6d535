use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ast::{Kind, Label, Signature, Term, Ty};

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub max_depth: usize,
    pub seed: u64,
    pub signature: Signature,
    pub label: Label,
    pub goal_type: Option<Ty>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("no {label} term of type {ty} exists within depth {depth}")]
    Unsatisfiable { label: Label, ty: Ty, depth: usize },
}

/// Generates one well-typed term; see [`Generator`].
pub fn gen_term(cfg: &GenConfig) -> Result<Term, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut g = Generator::new(&cfg.signature);
    let ty = match &cfg.goal_type {
        Some(t) => t.clone(),
        None => g.random_goal(cfg.label, &mut rng),
    };
    g.generate(cfg.label, &ty, cfg.max_depth, &mut rng)
}

/// Probability of picking a leaf when both leaves and compound
/// constructors fit.
const LEAF_WEIGHT: f64 = 0.4;
/// Probability of an effect mark among compound choices at `Src`.
const EACH_WEIGHT: f64 = 0.3;
/// Intermediate types are capped at this many constructors.
const MAX_TY_SIZE: usize = 7;
const LITERALS: [&str; 4] = ["a", "b", "foo", "bar"];

#[derive(Clone, Debug)]
enum Choice {
    Var(String),
    Const(String),
    Unt,
    Lit,
    Prd(Ty, Ty),
    Fst(Ty),
    Snd(Ty),
    App(Ty),
    Lam(Ty, Ty),
    Each,
    Pure(Ty),
    Map(Ty, Ty),
    Ap(Ty, Ty),
    Join(Ty),
}

type Key = (Label, Ty, usize, Vec<Ty>);

/// Type-directed generator. Every constructor is only chosen when its
/// premises can be met within the remaining depth, decided by a memoized
/// feasibility check. Every generated node carries its type.
pub struct Generator<'a> {
    sig: &'a Signature,
    memo: HashMap<Key, bool>,
    counter: usize,
}

fn ty_size(t: &Ty) -> usize {
    match t {
        Ty::Unit | Ty::Str => 1,
        Ty::Prod(a, b) | Ty::Arrow(a, b) => 1 + ty_size(a) + ty_size(b),
        Ty::Eff(a) => 1 + ty_size(a),
    }
}

fn scope_key(scope: &[(String, Ty)]) -> Vec<Ty> {
    scope
        .iter()
        .map(|(_, t)| t.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

impl<'a> Generator<'a> {
    pub fn new(sig: &'a Signature) -> Generator<'a> {
        Generator {
            sig,
            memo: HashMap::new(),
            counter: 0,
        }
    }

    /// A goal type typical for `label`.
    pub fn random_goal(&self, label: Label, rng: &mut ChaCha8Rng) -> Ty {
        let s = || Ty::Str;
        let base = [
            s(),
            s(),
            Ty::Unit,
            Ty::prod(s(), s()),
            Ty::prod(s(), Ty::Unit),
            Ty::arrow(s(), s()),
            Ty::eff(s()),
        ];
        let t = base.choose(rng).expect("non-empty").clone();
        match label {
            Label::Tgt => Ty::eff(t),
            _ => t,
        }
    }

    pub fn generate(
        &mut self,
        label: Label,
        ty: &Ty,
        depth: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<Term, GenError> {
        self.counter = 0;
        if !self.feasible(label, ty, depth, &[]) {
            return Err(GenError::Unsatisfiable {
                label,
                ty: ty.clone(),
                depth,
            });
        }
        let mut scope = Vec::new();
        Ok(self.build(label, ty, depth, &mut scope, rng))
    }

    fn intermediates() -> [Ty; 3] {
        [Ty::Str, Ty::Unit, Ty::eff(Ty::Str)]
    }

    fn leaves(&self, ty: &Ty, scope: &[(String, Ty)]) -> Vec<Choice> {
        let mut out = Vec::new();
        for (x, t) in scope.iter().rev() {
            if t == ty && !out.iter().any(|c| matches!(c, Choice::Var(y) if y == x)) {
                out.push(Choice::Var(x.clone()));
            }
        }
        for d in self.sig.iter() {
            if &d.ty == ty {
                out.push(Choice::Const(d.name.clone()));
            }
        }
        match ty {
            Ty::Unit => out.push(Choice::Unt),
            Ty::Str => out.push(Choice::Lit),
            _ => {}
        }
        out
    }

    fn compounds(&self, label: Label, ty: &Ty) -> Vec<Choice> {
        let mut out = Vec::new();
        match ty {
            Ty::Prod(a, b) => out.push(Choice::Prd((**a).clone(), (**b).clone())),
            Ty::Arrow(a, b) => out.push(Choice::Lam((**a).clone(), (**b).clone())),
            _ => {}
        }
        for m in [Ty::Str, Ty::Unit] {
            out.push(Choice::Fst(m.clone()));
            out.push(Choice::Snd(m));
        }
        for a in Self::intermediates() {
            out.push(Choice::App(a));
        }
        match label {
            Label::Src => out.push(Choice::Each),
            Label::Tgt => {
                if let Ty::Eff(t) = ty {
                    let t = (**t).clone();
                    out.push(Choice::Pure(t.clone()));
                    out.push(Choice::Join(t.clone()));
                    for a in [Ty::Str, Ty::Unit] {
                        out.push(Choice::Map(a.clone(), t.clone()));
                        out.push(Choice::Ap(a, t.clone()));
                    }
                }
            }
            Label::Com => {}
        }
        out
    }

    /// Premises of a compound choice: (label, type, extra binding).
    fn premises(label: Label, ty: &Ty, c: &Choice) -> Vec<(Label, Ty, Option<Ty>)> {
        let arrow = |a: &Ty, b: &Ty| Ty::arrow(a.clone(), b.clone());
        match c {
            Choice::Prd(a, b) => vec![(label, a.clone(), None), (label, b.clone(), None)],
            Choice::Fst(m) => vec![(label, Ty::prod(ty.clone(), m.clone()), None)],
            Choice::Snd(m) => vec![(label, Ty::prod(m.clone(), ty.clone()), None)],
            Choice::App(a) => vec![(label, arrow(a, ty), None), (label, a.clone(), None)],
            Choice::Lam(a, b) => vec![(Label::Com, b.clone(), Some(a.clone()))],
            Choice::Each => vec![(Label::Src, Ty::eff(ty.clone()), None)],
            Choice::Pure(t) => vec![(Label::Com, t.clone(), None)],
            Choice::Join(t) => vec![(Label::Tgt, Ty::eff(Ty::eff(t.clone())), None)],
            Choice::Map(a, t) => vec![
                (Label::Tgt, arrow(a, t), None),
                (Label::Tgt, Ty::eff(a.clone()), None),
            ],
            Choice::Ap(a, t) => vec![
                (Label::Tgt, Ty::eff(arrow(a, t)), None),
                (Label::Tgt, Ty::eff(a.clone()), None),
            ],
            Choice::Var(_) | Choice::Const(_) | Choice::Unt | Choice::Lit => vec![],
        }
    }

    fn premises_ok(
        &mut self,
        ps: &[(Label, Ty, Option<Ty>)],
        depth: usize,
        scope: &[(String, Ty)],
    ) -> bool {
        ps.iter().all(|(l, t, bind)| {
            if ty_size(t) > MAX_TY_SIZE {
                return false;
            }
            match bind {
                Some(a) => {
                    let mut inner = scope.to_vec();
                    inner.push((String::new(), a.clone()));
                    self.feasible(*l, t, depth, &inner)
                }
                None => self.feasible(*l, t, depth, scope),
            }
        })
    }

    fn feasible(&mut self, label: Label, ty: &Ty, depth: usize, scope: &[(String, Ty)]) -> bool {
        if depth == 0 {
            return false;
        }
        if !self.leaves(ty, scope).is_empty() {
            return true;
        }
        if depth == 1 {
            return false;
        }
        let key = (label, ty.clone(), depth, scope_key(scope));
        if let Some(&b) = self.memo.get(&key) {
            return b;
        }
        let mut ok = false;
        for c in self.compounds(label, ty) {
            let ps = Self::premises(label, ty, &c);
            if self.premises_ok(&ps, depth - 1, scope) {
                ok = true;
                break;
            }
        }
        self.memo.insert(key, ok);
        ok
    }

    fn build(
        &mut self,
        label: Label,
        ty: &Ty,
        depth: usize,
        scope: &mut Vec<(String, Ty)>,
        rng: &mut ChaCha8Rng,
    ) -> Term {
        let leaves = self.leaves(ty, scope);
        let mut compounds = Vec::new();
        if depth > 1 {
            for c in self.compounds(label, ty) {
                let ps = Self::premises(label, ty, &c);
                if self.premises_ok(&ps, depth - 1, scope) {
                    compounds.push(c);
                }
            }
        }
        let choice = if !leaves.is_empty() && (compounds.is_empty() || rng.gen_bool(LEAF_WEIGHT)) {
            leaves.choose(rng).expect("non-empty").clone()
        } else {
            let each = compounds.iter().position(|c| matches!(c, Choice::Each));
            match each {
                Some(i) if rng.gen_bool(EACH_WEIGHT) => compounds[i].clone(),
                _ => compounds.choose(rng).expect("feasible").clone(),
            }
        };
        let ps = Self::premises(label, ty, &choice);
        let mut kids = Vec::new();
        let mut param = None;
        for (l, t, bind) in &ps {
            match bind {
                Some(a) => {
                    self.counter += 1;
                    let x = format!("x{}", self.counter);
                    scope.push((x.clone(), a.clone()));
                    kids.push(self.build(*l, t, depth - 1, scope, rng));
                    scope.pop();
                    param = Some(x);
                }
                None => kids.push(self.build(*l, t, depth - 1, scope, rng)),
            }
        }
        let mut kids = kids.into_iter();
        let mut next = || Box::new(kids.next().expect("premise"));
        let kind = match choice {
            Choice::Var(x) => Kind::Var(x),
            Choice::Const(c) => Kind::Const(c),
            Choice::Unt => Kind::Unt,
            Choice::Lit => Kind::Lit(LITERALS.choose(rng).expect("non-empty").to_string()),
            Choice::Prd(..) => Kind::Prd(next(), next()),
            Choice::Fst(_) => Kind::Fst(next()),
            Choice::Snd(_) => Kind::Snd(next()),
            Choice::App(_) => Kind::App(next(), next()),
            Choice::Lam(..) => Kind::Lam(param.expect("bound"), next()),
            Choice::Each => Kind::Each(next()),
            Choice::Pure(_) => Kind::Pure(next()),
            Choice::Join(_) => Kind::Join(next()),
            Choice::Map(..) => Kind::Map(next(), next()),
            Choice::Ap(..) => Kind::Ap(next(), next()),
        };
        Term::new(label, kind).with_ty(ty.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typing::{typecheck, TypeEnv};

    fn cfg(label: Label, depth: usize, goal: Option<Ty>, seed: u64) -> GenConfig {
        GenConfig {
            max_depth: depth,
            seed,
            signature: Signature::standard(),
            label,
            goal_type: goal,
        }
    }

    #[test]
    fn depth_one_unit() {
        let mut c = cfg(Label::Src, 1, Some(Ty::Unit), 0);
        c.signature = Signature::new();
        assert_eq!(
            gen_term(&c).unwrap(),
            Term::unt(Label::Src).with_ty(Ty::Unit)
        );
    }

    #[test]
    fn unsatisfiable() {
        let mut c = cfg(Label::Src, 1, Some(Ty::arrow(Ty::Unit, Ty::Unit)), 0);
        c.signature = Signature::new();
        assert!(matches!(gen_term(&c), Err(GenError::Unsatisfiable { .. })));
    }

    #[test]
    fn deterministic() {
        let c = cfg(Label::Src, 5, None, 99);
        assert_eq!(gen_term(&c).unwrap(), gen_term(&c).unwrap());
    }

    #[test]
    fn generated_terms_typecheck() {
        let env = TypeEnv::new(Signature::standard());
        for label in [Label::Src, Label::Com, Label::Tgt] {
            for seed in 0..300 {
                let c = cfg(label, 5, None, seed);
                let t = gen_term(&c).unwrap();
                assert!(t.depth() <= 5);
                let ty = typecheck(&t, label, &env);
                assert_eq!(ty.as_ref(), Ok(t.ty.as_ref().unwrap()), "{t:?}");
            }
        }
    }

    #[test]
    fn effect_marks_are_reachable() {
        let c = |seed| cfg(Label::Src, 4, Some(Ty::Str), seed);
        let found = (0..200).any(|s| {
            gen_term(&c(s))
                .unwrap()
                .any(&|n| matches!(n.kind, Kind::Each(_)))
        });
        assert!(found);
    }
}
