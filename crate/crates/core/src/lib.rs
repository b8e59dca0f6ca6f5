//! Relational semantics and correctness judgments for a small imperative
//! language.
//!
//! Programs and specifications denote binary relations on a finite state
//! space. On top of that the crate decides refinement, absolute and partial
//! correctness, and relative correctness, and verifies derivation chains of
//! increasingly correct programs together with their reliability.

pub mod correctness;
pub mod derivation;
pub mod error;
pub mod proglang;
pub mod region;
pub mod relcore;
pub mod speclang;
pub mod syntax;

pub use error::{Error, Pos, Result};
pub use relcore::{Limits, Relation, StateSet, StateSpace, VarDecl};
