//! Whole programs: loading a `.pur` file, translating it, and measuring it.

use serde::Serialize;
use thiserror::Error;

use crate::ast::{ConstKind, Label, Signature, Term, Ty};
use crate::metrics::{span, work};
use crate::normalize::{normalize, NormalizeError};
use crate::pretty::{pretty, pretty_annotated, pretty_ty};
use crate::surface::{elaborate_any, parse, ElabError, ParseError};
use crate::translate::{translate_with, Mode};
use crate::typing::{stamp, TypeEnv, TypeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProgramError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Elab(#[from] ElabError),
    #[error("type error: {0}")]
    Type(#[from] TypeError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error("this command needs a direct-style program, but the body uses combinators")]
    NotSource,
}

/// A checked program. `term` carries type stamps on every node.
#[derive(Clone, Debug)]
pub struct Program {
    pub sig: Signature,
    pub term: Term,
    pub label: Label,
    pub ty: Ty,
}

impl Program {
    pub fn parse(src: &str) -> Result<Program, ProgramError> {
        let (sig, t) = elaborate_any(&parse(src)?)?;
        let label = t.label;
        let env = TypeEnv::new(sig.clone()).relaxed();
        let term = stamp(&t, label, &env)?;
        let ty = term.ty.clone().expect("stamped");
        Ok(Program {
            sig,
            term,
            label,
            ty,
        })
    }

    pub fn is_source(&self) -> bool {
        self.label == Label::Src
    }

    /// The translation of a source program, stamped.
    pub fn translate(&self, mode: Mode, normalized: bool) -> Result<Program, ProgramError> {
        if !self.is_source() {
            return Err(ProgramError::NotSource);
        }
        let mut t = translate_with(&self.term, mode);
        if normalized {
            t = normalize(&t)?;
        }
        let env = TypeEnv::new(self.sig.clone()).relaxed();
        let term = stamp(&t, Label::Tgt, &env)?;
        Ok(Program {
            sig: self.sig.clone(),
            ty: term.ty.clone().expect("stamped"),
            term,
            label: Label::Tgt,
        })
    }

    /// Declarations and body, in syntax [`Program::parse`] accepts.
    pub fn render(&self, annotate: bool) -> String {
        let mut out = String::new();
        for d in self.sig.iter() {
            let kw = match d.kind {
                ConstKind::Effectful => "effect",
                ConstKind::Pure => "prim",
            };
            out.push_str(&format!("{kw} {} : {}\n", d.name, pretty_ty(&d.ty)));
        }
        let body = if annotate {
            pretty_annotated(&self.term)
        } else {
            pretty(&self.term)
        };
        out.push_str(&format!("purify {{ {body} }}\n"));
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Analysis {
    pub v: u32,
    pub span_src: u64,
    pub work_src: u64,
    pub span_opt: u64,
    pub work_opt: u64,
    pub span_naive: u64,
    pub work_naive: u64,
    pub span_seq: u64,
    pub work_seq: u64,
}

pub fn analyze(p: &Program) -> Result<Analysis, ProgramError> {
    let m = |mode| -> Result<(u64, u64), ProgramError> {
        let t = p.translate(mode, false)?;
        Ok((span(&t.term), work(&t.term)))
    };
    if !p.is_source() {
        return Err(ProgramError::NotSource);
    }
    let (span_opt, work_opt) = m(Mode::Opt)?;
    let (span_naive, work_naive) = m(Mode::Naive)?;
    let (span_seq, work_seq) = m(Mode::Seq)?;
    Ok(Analysis {
        v: 1,
        span_src: span(&p.term),
        work_src: work(&p.term),
        span_opt,
        work_opt,
        span_naive,
        work_naive,
        span_seq,
        work_seq,
    })
}
