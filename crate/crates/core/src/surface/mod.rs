//! Concrete syntax: effect declarations followed by one `purify { ... }`
//! block, with `e!` marking direct-style effect execution.
//!
//! ```text
//! program  := decl* "purify" "{" expr "}"
//! decl     := ("effect" | "prim") IDENT ":" type
//! type     := btype ("->" type)?
//! btype    := "Eff" atype | atype
//! atype    := "Unit" | "Str" | "(" type "," type ")" | "(" type ")"
//! expr     := "fun" IDENT "->" expr | "let" IDENT "=" expr "in" expr | infix
//! infix    := app ("++" app)*
//! app      := head post*
//! head     := "pure" post | "join" post | "map" post post | "ap" post post | post
//! post     := atom (call | "!" | ".1" | ".2")*
//! call     := group                 -- only when "(" touches the previous token
//! atom     := IDENT | STRING | group
//! group    := "(" ")" | "(" expr ")" | "(" expr "," expr ")" | "(" expr ":" type ")"
//! ```
//!
//! `f(x)!` marks the call `f(x)`; `f x!` marks only `x`. Comments run from
//! `--` to the end of the line.

mod elaborate;
mod lexer;

use std::fmt;

use thiserror::Error;

use crate::ast::{ConstKind, Ty};

pub use elaborate::{elaborate, elaborate_any, elaborate_target, ElabError};
use lexer::{lex, Tok, Token};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
        found: String,
    },
    #[error("{line}:{col}: duplicate declaration of `{name}`")]
    DuplicateDecl {
        name: String,
        line: usize,
        col: usize,
    },
    #[error("{line}:{col}: `{name}` uses the reserved prefix `$`")]
    ReservedName {
        name: String,
        line: usize,
        col: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceDecl {
    pub name: String,
    pub ty: Ty,
    pub kind: ConstKind,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceProgram {
    pub decls: Vec<SurfaceDecl>,
    pub body: SExpr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SExpr {
    pub kind: SKind,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SKind {
    Ident(String),
    Unit,
    Str(String),
    Pair(Box<SExpr>, Box<SExpr>),
    Ann(Box<SExpr>, Ty),
    Fun(String, Box<SExpr>),
    Let(String, Box<SExpr>, Box<SExpr>),
    Concat(Box<SExpr>, Box<SExpr>),
    App(Box<SExpr>, Box<SExpr>),
    Bang(Box<SExpr>),
    Proj1(Box<SExpr>),
    Proj2(Box<SExpr>),
    Pure(Box<SExpr>),
    Map(Box<SExpr>, Box<SExpr>),
    Ap(Box<SExpr>, Box<SExpr>),
    Join(Box<SExpr>),
}

impl SExpr {
    fn new(kind: SKind, pos: Pos) -> SExpr {
        SExpr { kind, pos }
    }
}

pub fn parse(input: &str) -> Result<SurfaceProgram, ParseError> {
    let tokens = lex(input)?;
    let mut p = Parser { tokens, at: 0 };
    let prog = p.program()?;
    Ok(prog)
}

/// Parses a bare type, e.g. `Str -> Eff Str`.
pub fn parse_type(input: &str) -> Result<Ty, ParseError> {
    let tokens = lex(input)?;
    let mut p = Parser { tokens, at: 0 };
    let t = p.ty()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(t)
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.at]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> Result<T, ParseError> {
        let t = self.peek();
        Err(ParseError::Syntax {
            line: t.pos.line,
            col: t.pos.col,
            expected: expected.to_string(),
            found: t.tok.describe(),
        })
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<Token, ParseError> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            self.error(expected)
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                let pos = self.bump().pos;
                Ok((s, pos))
            }
            _ => self.error("identifier"),
        }
    }

    fn program(&mut self) -> Result<SurfaceProgram, ParseError> {
        let mut decls: Vec<SurfaceDecl> = Vec::new();
        loop {
            let kind = match self.peek().tok {
                Tok::Effect => ConstKind::Effectful,
                Tok::Prim => ConstKind::Pure,
                _ => break,
            };
            self.bump();
            let (name, pos) = self.ident()?;
            if name.starts_with(crate::ast::FRESH_PREFIX) {
                return Err(ParseError::ReservedName {
                    name,
                    line: pos.line,
                    col: pos.col,
                });
            }
            if decls.iter().any(|d| d.name == name) {
                return Err(ParseError::DuplicateDecl {
                    name,
                    line: pos.line,
                    col: pos.col,
                });
            }
            self.expect(Tok::Colon, "`:`")?;
            let ty = self.ty()?;
            decls.push(SurfaceDecl {
                name,
                ty,
                kind,
                pos,
            });
        }
        self.expect(Tok::Purify, "`effect`, `prim` or `purify`")?;
        self.expect(Tok::LBrace, "`{`")?;
        let body = self.expr()?;
        self.expect(Tok::RBrace, "`}`")?;
        self.expect(Tok::Eof, "end of input")?;
        Ok(SurfaceProgram { decls, body })
    }

    fn ty(&mut self) -> Result<Ty, ParseError> {
        let lhs = if self.peek().tok == Tok::TEff {
            self.bump();
            Ty::eff(self.atype()?)
        } else {
            self.atype()?
        };
        if self.peek().tok == Tok::Arrow {
            self.bump();
            Ok(Ty::arrow(lhs, self.ty()?))
        } else {
            Ok(lhs)
        }
    }

    fn atype(&mut self) -> Result<Ty, ParseError> {
        match self.peek().tok {
            Tok::TUnit => {
                self.bump();
                Ok(Ty::Unit)
            }
            Tok::TStr => {
                self.bump();
                Ok(Ty::Str)
            }
            Tok::LParen => {
                self.bump();
                let a = self.ty()?;
                if self.peek().tok == Tok::Comma {
                    self.bump();
                    let b = self.ty()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Ty::prod(a, b))
                } else {
                    self.expect(Tok::RParen, "`,` or `)`")?;
                    Ok(a)
                }
            }
            _ => self.error("type"),
        }
    }

    fn expr(&mut self) -> Result<SExpr, ParseError> {
        let pos = self.peek().pos;
        match self.peek().tok {
            Tok::Fun => {
                self.bump();
                let (x, _) = self.ident()?;
                self.expect(Tok::Arrow, "`->`")?;
                let body = self.expr()?;
                Ok(SExpr::new(SKind::Fun(x, Box::new(body)), pos))
            }
            Tok::Let => {
                self.bump();
                let (x, _) = self.ident()?;
                self.expect(Tok::Eq, "`=`")?;
                let bound = self.expr()?;
                self.expect(Tok::In, "`in`")?;
                let body = self.expr()?;
                Ok(SExpr::new(
                    SKind::Let(x, Box::new(bound), Box::new(body)),
                    pos,
                ))
            }
            _ => self.infix(),
        }
    }

    fn infix(&mut self) -> Result<SExpr, ParseError> {
        let mut lhs = self.app()?;
        while self.peek().tok == Tok::Concat {
            let pos = self.bump().pos;
            let rhs = self.app()?;
            lhs = SExpr::new(SKind::Concat(Box::new(lhs), Box::new(rhs)), pos);
        }
        Ok(lhs)
    }

    fn starts_post(&self) -> bool {
        matches!(self.peek().tok, Tok::Ident(_) | Tok::Str(_) | Tok::LParen)
    }

    fn app(&mut self) -> Result<SExpr, ParseError> {
        let pos = self.peek().pos;
        let mut head = match self.peek().tok {
            Tok::KPure => {
                self.bump();
                SExpr::new(SKind::Pure(Box::new(self.post()?)), pos)
            }
            Tok::KJoin => {
                self.bump();
                SExpr::new(SKind::Join(Box::new(self.post()?)), pos)
            }
            Tok::KMap => {
                self.bump();
                let f = self.post()?;
                let e = self.post()?;
                SExpr::new(SKind::Map(Box::new(f), Box::new(e)), pos)
            }
            Tok::KAp => {
                self.bump();
                let f = self.post()?;
                let e = self.post()?;
                SExpr::new(SKind::Ap(Box::new(f), Box::new(e)), pos)
            }
            _ => self.post()?,
        };
        while self.starts_post() {
            let arg = self.post()?;
            head = SExpr::new(SKind::App(Box::new(head), Box::new(arg)), pos);
        }
        Ok(head)
    }

    fn post(&mut self) -> Result<SExpr, ParseError> {
        let mut e = self.atom()?;
        loop {
            let t = self.peek();
            let pos = t.pos;
            match t.tok {
                Tok::LParen if t.adjacent => {
                    self.bump();
                    let arg = self.group(pos)?;
                    e = SExpr::new(SKind::App(Box::new(e), Box::new(arg)), pos);
                }
                Tok::Bang => {
                    self.bump();
                    e = SExpr::new(SKind::Bang(Box::new(e)), pos);
                }
                Tok::Proj1 => {
                    self.bump();
                    e = SExpr::new(SKind::Proj1(Box::new(e)), pos);
                }
                Tok::Proj2 => {
                    self.bump();
                    e = SExpr::new(SKind::Proj2(Box::new(e)), pos);
                }
                _ => return Ok(e),
            }
        }
    }

    fn atom(&mut self) -> Result<SExpr, ParseError> {
        let pos = self.peek().pos;
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                self.bump();
                Ok(SExpr::new(SKind::Ident(s), pos))
            }
            Tok::Str(s) => {
                let s = s.clone();
                self.bump();
                Ok(SExpr::new(SKind::Str(s), pos))
            }
            Tok::LParen => {
                self.bump();
                self.group(pos)
            }
            _ => self.error("expression"),
        }
    }

    /// Parses the rest of a parenthesised group, the `(` already consumed.
    fn group(&mut self, pos: Pos) -> Result<SExpr, ParseError> {
        if self.peek().tok == Tok::RParen {
            self.bump();
            return Ok(SExpr::new(SKind::Unit, pos));
        }
        let e = self.expr()?;
        match self.peek().tok {
            Tok::Comma => {
                self.bump();
                let f = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(SExpr::new(SKind::Pair(Box::new(e), Box::new(f)), pos))
            }
            Tok::Colon => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(SExpr::new(SKind::Ann(Box::new(e), t), pos))
            }
            _ => {
                self.expect(Tok::RParen, "`,`, `:` or `)`")?;
                Ok(e)
            }
        }
    }
}
