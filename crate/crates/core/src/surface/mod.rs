//! Concrete syntax: the sequent grammar, signature files, derivation
//! scripts, and the deterministic printer.
//!
//! Grammar summary (tightest binding first):
//!
//! * types — postfix dual `^`; tensor `@`, left-associative; unit `I`;
//!   parentheses;
//! * terms — postfix star `^`; scalar product `.`; tensor `@`,
//!   left-associative; scalar `1`; dimension `D[T]`; constants `#name`;
//! * sequents — `ctx1:T1, ctx2:T2 |- { l : r, l2 :[T] r2 } t:T` with the
//!   soup braces omitted when empty;
//! * comments — lines whose first non-blank character is `#`.
//!
//! Printing always annotates soup connections (`:[T]`), parenthesizes
//! tensors and products fully, and emits variables exactly as stored, so
//! `parse(print(s)) == s` holds structurally.

mod lex;
mod parse;
mod script;
mod sig;

pub use parse::{parse_sequent, parse_sequent_line, parse_sequents, parse_term, parse_type};
pub use script::{parse_script, Sexp};
pub use sig::{parse_complex, parse_signature};

use crate::sequent::Sequent;
use crate::term::Term;
use crate::types::Ty;

/// Deterministic printer for sequents (inverse of [`parse_sequent`]).
pub fn print_sequent(seq: &Sequent) -> String {
    seq.to_string()
}

pub fn print_term(term: &Term) -> String {
    term.to_string()
}

pub fn print_type(ty: &Ty) -> String {
    ty.to_string()
}
