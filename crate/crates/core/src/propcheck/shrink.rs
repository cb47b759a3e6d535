use crate::ast::{Label, Term};
use crate::typing::{typecheck, TypeEnv};

/// Upper bound on accepted shrinking steps.
const MAX_STEPS: usize = 200;

/// Greedily replaces subterms by smaller ones of the same type and label
/// while the result still typechecks at `label` with the original type
/// and `prop` still fails on it.
pub fn shrink<E>(
    t: &Term,
    label: Label,
    env: &TypeEnv,
    prop: impl Fn(&Term) -> Result<(), E>,
) -> Term {
    let Ok(ty) = typecheck(t, label, env) else {
        return t.clone();
    };
    let mut cur = t.clone();
    'outer: for _ in 0..MAX_STEPS {
        for cand in candidates(&cur) {
            if cand.size() >= cur.size() {
                continue;
            }
            if typecheck(&cand, label, env).as_ref() == Ok(&ty) && prop(&cand).is_err() {
                cur = cand;
                continue 'outer;
            }
        }
        break;
    }
    cur
}

/// Pre-order paths to every node.
fn paths(t: &Term, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(prefix.clone());
    for (i, c) in t.children().into_iter().enumerate() {
        prefix.push(i);
        paths(c, prefix, out);
        prefix.pop();
    }
}

fn at<'a>(t: &'a Term, path: &[usize]) -> &'a Term {
    path.iter().fold(t, |n, &i| n.children()[i])
}

fn replace(t: &Term, path: &[usize], with: &Term) -> Term {
    let mut out = t.clone();
    let mut n = &mut out;
    for &i in path {
        n = n.children_mut().into_iter().nth(i).expect("valid path");
    }
    *n = with.clone();
    out
}

/// Smaller variants: a node replaced by one of its descendants of the same
/// type and label, or by a literal leaf.
fn candidates(t: &Term) -> Vec<Term> {
    let mut ps = vec![];
    paths(t, &mut vec![], &mut ps);
    let mut out = vec![];
    for p in &ps {
        let node = at(t, p);
        let mut below = vec![];
        paths(node, &mut vec![], &mut below);
        for q in below.iter().skip(1) {
            let d = at(node, q);
            if d.ty == node.ty && d.label == node.label {
                out.push(replace(t, p, d));
            }
        }
        let leaf = match &node.ty {
            Some(crate::ast::Ty::Unit) => Some(Term::unt(node.label)),
            Some(crate::ast::Ty::Str) => Some(Term::lit(node.label, "a")),
            _ => None,
        };
        if let Some(l) = leaf {
            if node.size() > 1 {
                out.push(replace(t, p, &l.with_ty(node.ty.clone().expect("typed"))));
            }
        }
    }
    out
}
