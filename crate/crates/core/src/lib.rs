//! A small supercompiler for a strict first-order language with
//! sequence patterns, together with analyses of residual programs and
//! generators for word-equation and river-crossing problems.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analyses;
pub mod corpus;
pub mod eval;
pub mod lang;
pub mod matching;
pub mod scp;
pub mod syntax;

pub use eval::{eval, Outcome};
pub use lang::{Expr, Function, Program, Sentence, Substitution, Symbol, Term, Var, VarKind};
pub use matching::match_pattern;
pub use syntax::{parse_expr, parse_program, print_expr, print_program};
