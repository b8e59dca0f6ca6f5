//! Finite binary-relation algebra over enumerable state spaces.

mod bits;
mod literal;
mod relation;
mod space;
mod stateset;

pub use bits::BitSet;
pub use literal::{parse_relation, serialize_relation};
pub(crate) use relation::RowBuilder;
pub use relation::{Relation, Row};
pub use space::{format_tuple, Limits, StateIter, StateSpace, VarDecl, DEFAULT_DENSE_BUDGET_BITS, DEFAULT_MAX_STATES};
pub use stateset::StateSet;
