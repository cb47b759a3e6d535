//! Direct-style effect marks compiled to mixed applicative/monadic
//! combinators, with executable checks of type, meaning, span and work
//! preservation.

pub mod ast;
pub mod config;
pub mod metrics;
pub mod normalize;
pub mod pretty;
pub mod program;
pub mod propcheck;
pub mod semantics;
pub mod surface;
pub mod translate;
pub mod typing;
