//! Kernel for a linearly typed lambda calculus with an involutive linear
//! negation ("dagger"), explicit-substitution *soup* reduction, and a
//! finite-dimensional complex matrix semantics.
//!
//! The crate is organized bottom-up:
//!
//! * [`types`] / [`term`] — star-normal types and terms;
//! * [`sequent`] — connections, soups, and validated sequents;
//! * [`canon`] — canonical forms and alpha-equivalence;
//! * [`surface`] — concrete syntax: sequent files, signatures, derivation
//!   scripts, and the deterministic printer;
//! * [`calculus`] — the sequent rules, derivation replay, the dagger flip,
//!   and the combinator library;
//! * [`rewrite`] — soup redexes, single steps, bounded normalization, and
//!   the exhaustive reduction graph;
//! * [`model`] — wire-graph compilation and tensor contraction, step
//!   preservation, and the categorical axiom checks.

pub mod calculus;
pub mod canon;
pub mod error;
pub mod model;
pub mod rewrite;
pub mod sequent;
pub mod surface;
pub mod term;
pub mod types;

pub use error::{Error, Result};
pub use sequent::{Connection, Sequent, Soup, TypedTerm};
pub use term::Term;
pub use types::Ty;
