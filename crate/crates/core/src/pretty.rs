//! Rendering terms in the concrete syntax accepted by [`crate::surface`].

use crate::ast::{Kind, Term, Ty};

// precedence levels, loosest first
const EXPR: u8 = 0;
const INFIX: u8 = 1;
const APP: u8 = 2;
const POST: u8 = 3;

/// Renders a term. Type stamps are not printed.
pub fn pretty(e: &Term) -> String {
    let mut p = Printer { annotate: false };
    p.expr(e, EXPR)
}

/// Like [`pretty`], but every lambda that carries a type stamp is printed
/// with an annotation `(fun x -> e : A -> B)` so the output re-checks
/// without inference ambiguity.
pub fn pretty_annotated(e: &Term) -> String {
    let mut p = Printer { annotate: true };
    p.expr(e, EXPR)
}

pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

struct Printer {
    annotate: bool,
}

fn concat_operands(e: &Term) -> Option<(&Term, &Term)> {
    if let Kind::App(f, b) = &e.kind {
        if let Kind::App(c, a) = &f.kind {
            if matches!(&c.kind, Kind::Const(n) if n == "concat") {
                return Some((a, b));
            }
        }
    }
    None
}

impl Printer {
    fn expr(&mut self, e: &Term, min: u8) -> String {
        let (s, level) = self.render(e);
        if level < min {
            format!("({s})")
        } else {
            s
        }
    }

    fn render(&mut self, e: &Term) -> (String, u8) {
        if let Some((a, b)) = concat_operands(e) {
            return (
                format!("{} ++ {}", self.expr(a, INFIX), self.expr(b, APP)),
                INFIX,
            );
        }
        match &e.kind {
            Kind::Var(x) | Kind::Const(x) => (x.clone(), POST + 1),
            Kind::Unt => ("()".into(), POST + 1),
            Kind::Lit(s) => (quote(s), POST + 1),
            Kind::Prd(a, b) => (
                format!("({}, {})", self.expr(a, EXPR), self.expr(b, EXPR)),
                POST + 1,
            ),
            Kind::Fst(p) => (format!("{}.1", self.expr(p, POST)), POST),
            Kind::Snd(p) => (format!("{}.2", self.expr(p, POST)), POST),
            Kind::Each(x) => (format!("{}!", self.expr(x, POST)), POST),
            Kind::App(f, a) => {
                let arg = match a.kind {
                    Kind::Prd(..) | Kind::Unt => self.expr(a, POST + 1),
                    _ => format!("({})", self.expr(a, EXPR)),
                };
                (format!("{}{}", self.expr(f, POST), arg), POST)
            }
            Kind::Lam(x, b) => {
                let s = format!("fun {x} -> {}", self.expr(b, EXPR));
                match (&e.ty, self.annotate) {
                    (Some(t), true) => (format!("({s} : {t})"), POST + 1),
                    _ => (s, EXPR),
                }
            }
            Kind::Pure(x) => (format!("pure {}", self.expr(x, POST)), APP),
            Kind::Join(x) => (format!("join {}", self.expr(x, POST)), APP),
            Kind::Map(f, x) => (
                format!("map {} {}", self.expr(f, POST), self.expr(x, POST)),
                APP,
            ),
            Kind::Ap(f, x) => (
                format!("ap {} {}", self.expr(f, POST), self.expr(x, POST)),
                APP,
            ),
        }
    }
}

/// Renders a type in the declaration grammar.
pub fn pretty_ty(t: &Ty) -> String {
    t.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::Label::*;

    #[test]
    fn unit() {
        assert_eq!(pretty(&Term::unt(Src)), "()");
    }

    #[test]
    fn marked_call() {
        let e = Term::each(Term::app(
            Src,
            Term::constant(Src, "fetch"),
            Term::lit(Src, "u"),
        ));
        assert_eq!(pretty(&e), "fetch(\"u\")!");
    }

    #[test]
    fn combinators() {
        let e = Term::ap(
            Term::pure(Term::lam(Com, "x", Term::var(Com, "x"))),
            Term::constant(Tgt, "ff"),
        );
        assert_eq!(pretty(&e), "ap (pure (fun x -> x)) ff");
    }

    #[test]
    fn concat_is_infix() {
        let c = |a, b| Term::app(Src, Term::app(Src, Term::constant(Src, "concat"), a), b);
        let e = c(
            c(Term::lit(Src, "a"), Term::lit(Src, "b")),
            Term::lit(Src, "c"),
        );
        assert_eq!(pretty(&e), "\"a\" ++ \"b\" ++ \"c\"");
        let e = c(
            Term::lit(Src, "a"),
            c(Term::lit(Src, "b"), Term::lit(Src, "c")),
        );
        assert_eq!(pretty(&e), "\"a\" ++ (\"b\" ++ \"c\")");
    }

    #[test]
    fn escapes() {
        assert_eq!(quote("a\"b\\"), "\"a\\\"b\\\\\"");
    }

    #[test]
    fn annotated_lambda() {
        let e = Term::lam(Com, "x", Term::var(Com, "x")).with_ty(Ty::arrow(Ty::Str, Ty::Str));
        assert_eq!(pretty_annotated(&e), "(fun x -> x : Str -> Str)");
        assert_eq!(pretty(&e), "fun x -> x");
    }
}
