use std::fmt;
use std::sync::Arc;

use super::bits::BitSet;
use super::relation::{Relation, RowBuilder};
use super::space::{Limits, StateSpace};
use crate::error::{Error, Result};

/// A subset of a state space. Interconvertible with the vector `A × S`
/// and the monotype `I(A)`.
#[derive(Clone, PartialEq, Eq)]
pub struct StateSet {
    space: Arc<StateSpace>,
    bits: BitSet,
}

impl StateSet {
    pub fn empty(space: Arc<StateSpace>) -> Self {
        let n = space.len().expect("space too large for a state set");
        StateSet {
            space,
            bits: BitSet::new(n),
        }
    }

    pub fn full(space: Arc<StateSpace>) -> Self {
        let n = space.len().expect("space too large for a state set");
        StateSet {
            space,
            bits: BitSet::full(n),
        }
    }

    pub(crate) fn from_bits(space: Arc<StateSpace>, bits: BitSet) -> Self {
        StateSet { space, bits }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(space: Arc<StateSpace>, idx: I) -> Result<Self> {
        let mut s = StateSet::empty(space);
        for i in idx {
            if i >= s.bits.capacity() {
                return Err(Error::StateOutOfSpace {
                    state: format!("index {i}"),
                    space: s.space.name().to_string(),
                });
            }
            s.bits.insert(i);
        }
        Ok(s)
    }

    /// The set of states satisfying `pred`.
    pub fn from_predicate<F: FnMut(&[i64]) -> bool>(space: Arc<StateSpace>, mut pred: F) -> Self {
        let mut s = StateSet::empty(space.clone());
        let mut it = space.states();
        let mut i = 0;
        while let Some(st) = it.current() {
            if pred(st) {
                s.bits.insert(i);
            }
            i += 1;
            it.advance();
        }
        s
    }

    /// Recovers `A` from a relation that is a vector `A × S`; fails if it is not one.
    pub fn from_vector(v: &Relation) -> Result<Self> {
        let dom = v.domain();
        let back = dom.vector();
        if back != *v {
            return Err(Error::Inconsistent("relation is not a vector".into()));
        }
        Ok(dom)
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits.contains(i)
    }

    pub fn contains_state(&self, values: &[i64]) -> bool {
        self.space.index_of(values).is_ok_and(|i| self.contains(i))
    }

    pub fn insert(&mut self, i: usize) {
        self.bits.insert(i);
    }

    pub fn len(&self) -> usize {
        self.bits.count()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter()
    }

    pub fn states(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        self.bits.iter().map(|i| self.space.state_at(i))
    }

    pub fn first(&self) -> Option<usize> {
        self.bits.first()
    }

    fn check(&self, other: &StateSet) -> Result<()> {
        if *self.space == *other.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                left: self.space.name().to_string(),
                right: other.space.name().to_string(),
            })
        }
    }

    pub fn union(&self, other: &StateSet) -> Result<StateSet> {
        self.check(other)?;
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        Ok(StateSet::from_bits(self.space.clone(), bits))
    }

    pub fn intersection(&self, other: &StateSet) -> Result<StateSet> {
        self.check(other)?;
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        Ok(StateSet::from_bits(self.space.clone(), bits))
    }

    pub fn difference(&self, other: &StateSet) -> Result<StateSet> {
        self.check(other)?;
        let mut bits = self.bits.clone();
        bits.subtract(&other.bits);
        Ok(StateSet::from_bits(self.space.clone(), bits))
    }

    pub fn complement(&self) -> StateSet {
        StateSet::from_bits(self.space.clone(), self.bits.complement())
    }

    pub fn is_subset(&self, other: &StateSet) -> Result<bool> {
        self.check(other)?;
        Ok(self.bits.is_subset(&other.bits))
    }

    /// Least member of `self` missing from `other`.
    pub fn first_not_in(&self, other: &StateSet) -> Option<usize> {
        self.indices().find(|&i| !other.contains(i))
    }

    /// The vector `A × S`.
    pub fn vector(&self) -> Relation {
        let n = self.bits.capacity();
        let mut b = RowBuilder::for_limits(n, &Limits::default());
        let full = BitSet::full(n);
        let empty = BitSet::new(n);
        for i in 0..n {
            b.push_words(if self.contains(i) { full.words() } else { empty.words() });
        }
        b.finish(self.space.clone())
    }

    /// The monotype `I(A)`.
    pub fn monotype(&self) -> Relation {
        Relation::from_fn(self.space.clone(), |i| self.contains(i).then_some(i))
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.states()).finish()
    }
}
