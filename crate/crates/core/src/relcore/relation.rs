use std::fmt;
use std::sync::Arc;

use super::bits::{words_for, BitSet, Ones, Scratch};
use super::space::{Limits, StateSpace};
use super::stateset::StateSet;
use crate::error::{Error, Result};

/// A binary relation on a finite state space: a set of `(s, s')` index pairs.
///
/// Two representations are used, a dense bit matrix for small spaces and a
/// row-compressed sorted pair list otherwise. They are interchangeable:
/// equality and every operation are extensional.
#[derive(Clone)]
pub struct Relation {
    space: Arc<StateSpace>,
    n: usize,
    repr: Repr,
}

#[derive(Clone)]
enum Repr {
    Dense { wpr: usize, words: Vec<u64> },
    Sparse { offsets: Vec<usize>, cols: Vec<u32> },
}

fn space_len(space: &StateSpace) -> usize {
    match space.len() {
        Some(n) if n <= u32::MAX as usize => n,
        _ => panic!(
            "space `{}` with {} states cannot be materialized as a relation",
            space.name(),
            space.size()
        ),
    }
}

/// Row-at-a-time relation construction, rows pushed in ascending order.
pub(crate) struct RowBuilder {
    n: usize,
    repr: Repr,
}

impl RowBuilder {
    pub fn new(n: usize, dense: bool) -> Self {
        let repr = if dense {
            Repr::Dense {
                wpr: words_for(n),
                words: Vec::with_capacity(words_for(n) * n),
            }
        } else {
            let mut offsets = Vec::with_capacity(n + 1);
            offsets.push(0);
            Repr::Sparse {
                offsets,
                cols: Vec::new(),
            }
        };
        RowBuilder { n, repr }
    }

    pub fn for_limits(n: usize, limits: &Limits) -> Self {
        RowBuilder::new(n, limits.prefers_dense(n))
    }

    /// Appends a row given as ascending column indices.
    pub fn push_sorted<I: IntoIterator<Item = usize>>(&mut self, cols: I) {
        match &mut self.repr {
            Repr::Dense { wpr, words } => {
                let base = words.len();
                words.resize(base + *wpr, 0);
                for c in cols {
                    words[base + c / 64] |= 1 << (c % 64);
                }
            }
            Repr::Sparse { offsets, cols: out } => {
                out.extend(cols.into_iter().map(|c| c as u32));
                offsets.push(out.len());
            }
        }
    }

    pub fn push_scratch(&mut self, scratch: &mut Scratch, buf: &mut Vec<u32>) {
        buf.clear();
        scratch.drain_sorted(buf);
        self.push_sorted(buf.iter().map(|&c| c as usize));
    }

    /// Appends a row given as a full bit row of `words_for(n)` words.
    pub fn push_words(&mut self, row: &[u64]) {
        match &mut self.repr {
            Repr::Dense { words, .. } => words.extend_from_slice(row),
            Repr::Sparse { offsets, cols } => {
                cols.extend(Ones::new(row).map(|c| c as u32));
                offsets.push(cols.len());
            }
        }
    }

    pub fn finish(self, space: Arc<StateSpace>) -> Relation {
        debug_assert_eq!(space_len(&space), self.n);
        Relation {
            space,
            n: self.n,
            repr: self.repr,
        }
    }
}

/// Ascending column iterator over one row.
pub enum Row<'a> {
    Dense(Ones<'a>),
    Sparse(std::slice::Iter<'a, u32>),
}

impl Iterator for Row<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        match self {
            Row::Dense(it) => it.next(),
            Row::Sparse(it) => it.next().map(|&c| c as usize),
        }
    }
}

impl Relation {
    fn builder_like(&self) -> RowBuilder {
        RowBuilder::new(self.n, self.is_dense())
    }

    fn default_dense(n: usize) -> bool {
        Limits::default().prefers_dense(n)
    }

    pub fn empty(space: Arc<StateSpace>) -> Self {
        let n = space_len(&space);
        Relation::empty_with(space, Self::default_dense(n))
    }

    pub(crate) fn empty_with(space: Arc<StateSpace>, dense: bool) -> Self {
        let n = space_len(&space);
        let mut b = RowBuilder::new(n, dense);
        for _ in 0..n {
            b.push_sorted(std::iter::empty());
        }
        b.finish(space)
    }

    /// The identity relation `I`.
    pub fn identity(space: Arc<StateSpace>) -> Self {
        let n = space_len(&space);
        Relation::identity_with(space, Self::default_dense(n))
    }

    pub(crate) fn identity_with(space: Arc<StateSpace>, dense: bool) -> Self {
        let n = space_len(&space);
        let mut b = RowBuilder::new(n, dense);
        for i in 0..n {
            b.push_sorted(std::iter::once(i));
        }
        b.finish(space)
    }

    /// The universal relation `L = S × S`.
    pub fn universal(space: Arc<StateSpace>) -> Self {
        let n = space_len(&space);
        let mut b = RowBuilder::new(n, Self::default_dense(n));
        let full = BitSet::full(n);
        for _ in 0..n {
            b.push_words(full.words());
        }
        b.finish(space)
    }

    /// Builds a relation from index pairs in any order; duplicates are merged.
    pub fn from_pairs<I>(space: Arc<StateSpace>, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = space_len(&space);
        let mut v: Vec<(usize, usize)> = pairs.into_iter().collect();
        if let Some(&(a, b)) = v.iter().find(|(a, b)| *a >= n || *b >= n) {
            return Err(Error::StateOutOfSpace {
                state: format!("index pair ({a},{b})"),
                space: space.name().to_string(),
            });
        }
        v.sort_unstable();
        v.dedup();
        let mut b = RowBuilder::new(n, Self::default_dense(n));
        let mut it = v.into_iter().peekable();
        for i in 0..n {
            let mut row = Vec::new();
            while let Some(&(a, c)) = it.peek() {
                if a != i {
                    break;
                }
                row.push(c);
                it.next();
            }
            b.push_sorted(row);
        }
        Ok(b.finish(space))
    }

    /// Builds a relation from value-tuple pairs.
    pub fn from_state_pairs<'a, I>(space: Arc<StateSpace>, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [i64], &'a [i64])>,
    {
        let mut idx = Vec::new();
        for (a, b) in pairs {
            idx.push((space.index_of(a)?, space.index_of(b)?));
        }
        Relation::from_pairs(space, idx)
    }

    /// Builds a functional relation from a partial index map.
    pub fn from_fn<F>(space: Arc<StateSpace>, mut f: F) -> Self
    where
        F: FnMut(usize) -> Option<usize>,
    {
        let n = space_len(&space);
        let mut b = RowBuilder::new(n, Self::default_dense(n));
        for i in 0..n {
            b.push_sorted(f(i));
        }
        b.finish(space)
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    /// Number of states in the underlying space.
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.repr, Repr::Dense { .. })
    }

    pub fn row(&self, i: usize) -> Row<'_> {
        match &self.repr {
            Repr::Dense { wpr, words } => Row::Dense(Ones::new(&words[i * wpr..(i + 1) * wpr])),
            Repr::Sparse { offsets, cols } => Row::Sparse(cols[offsets[i]..offsets[i + 1]].iter()),
        }
    }

    fn row_words(&self, i: usize) -> Option<&[u64]> {
        match &self.repr {
            Repr::Dense { wpr, words } => Some(&words[i * wpr..(i + 1) * wpr]),
            Repr::Sparse { .. } => None,
        }
    }

    pub fn row_len(&self, i: usize) -> usize {
        match &self.repr {
            Repr::Dense { .. } => self.row_words(i).unwrap().iter().map(|w| w.count_ones() as usize).sum(),
            Repr::Sparse { offsets, .. } => offsets[i + 1] - offsets[i],
        }
    }

    pub fn row_is_empty(&self, i: usize) -> bool {
        match &self.repr {
            Repr::Dense { .. } => self.row_words(i).unwrap().iter().all(|&w| w == 0),
            Repr::Sparse { offsets, .. } => offsets[i + 1] == offsets[i],
        }
    }

    pub fn contains(&self, s: usize, t: usize) -> bool {
        match &self.repr {
            Repr::Dense { wpr, words } => words[s * wpr + t / 64] >> (t % 64) & 1 == 1,
            Repr::Sparse { offsets, cols } => cols[offsets[s]..offsets[s + 1]].binary_search(&(t as u32)).is_ok(),
        }
    }

    /// Number of pairs.
    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Dense { words, .. } => words.iter().map(|w| w.count_ones() as usize).sum(),
            Repr::Sparse { cols, .. } => cols.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        match &self.repr {
            Repr::Dense { words, .. } => words.iter().all(|&w| w == 0),
            Repr::Sparse { cols, .. } => cols.is_empty(),
        }
    }

    /// All pairs in canonical order (by source index, then target index).
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |j| (i, j)))
    }

    pub fn to_dense(&self) -> Relation {
        if self.is_dense() {
            return self.clone();
        }
        self.rebuild(true)
    }

    pub fn to_sparse(&self) -> Relation {
        if !self.is_dense() {
            return self.clone();
        }
        self.rebuild(false)
    }

    fn rebuild(&self, dense: bool) -> Relation {
        let mut b = RowBuilder::new(self.n, dense);
        for i in 0..self.n {
            b.push_sorted(self.row(i));
        }
        b.finish(self.space.clone())
    }

    pub(crate) fn check_same_space(&self, other: &Relation) -> Result<()> {
        if Arc::ptr_eq(&self.space, &other.space) || *self.space == *other.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                left: self.space.name().to_string(),
                right: other.space.name().to_string(),
            })
        }
    }

    fn zip_rows<F>(&self, other: &Relation, word_op: fn(u64, u64) -> u64, mut merge: F) -> Result<Relation>
    where
        F: FnMut(Row<'_>, Row<'_>, &mut Vec<usize>),
    {
        self.check_same_space(other)?;
        if let (Repr::Dense { words: a, wpr }, Repr::Dense { words: b, .. }) = (&self.repr, &other.repr) {
            let words = a.iter().zip(b).map(|(&x, &y)| word_op(x, y)).collect();
            return Ok(Relation {
                space: self.space.clone(),
                n: self.n,
                repr: Repr::Dense { wpr: *wpr, words },
            });
        }
        let mut b = self.builder_like();
        let mut buf = Vec::new();
        for i in 0..self.n {
            buf.clear();
            merge(self.row(i), other.row(i), &mut buf);
            b.push_sorted(buf.iter().copied());
        }
        Ok(b.finish(self.space.clone()))
    }

    pub fn union(&self, other: &Relation) -> Result<Relation> {
        self.zip_rows(
            other,
            |a, b| a | b,
            |x, y, out| {
                let (mut x, mut y) = (x.peekable(), y.peekable());
                loop {
                    match (x.peek().copied(), y.peek().copied()) {
                        (Some(a), Some(b)) if a == b => {
                            out.push(a);
                            x.next();
                            y.next();
                        }
                        (Some(a), Some(b)) if a < b => {
                            out.push(a);
                            x.next();
                        }
                        (Some(_), Some(b)) => {
                            out.push(b);
                            y.next();
                        }
                        (Some(a), None) => {
                            out.push(a);
                            x.next();
                        }
                        (None, Some(b)) => {
                            out.push(b);
                            y.next();
                        }
                        (None, None) => break,
                    }
                }
            },
        )
    }

    pub fn intersection(&self, other: &Relation) -> Result<Relation> {
        self.zip_rows(
            other,
            |a, b| a & b,
            |x, y, out| {
                let mut y = y.peekable();
                for a in x {
                    while y.peek().is_some_and(|&b| b < a) {
                        y.next();
                    }
                    if y.peek() == Some(&a) {
                        out.push(a);
                    }
                }
            },
        )
    }

    pub fn difference(&self, other: &Relation) -> Result<Relation> {
        self.zip_rows(
            other,
            |a, b| a & !b,
            |x, y, out| {
                let mut y = y.peekable();
                for a in x {
                    while y.peek().is_some_and(|&b| b < a) {
                        y.next();
                    }
                    if y.peek() != Some(&a) {
                        out.push(a);
                    }
                }
            },
        )
    }

    /// `L \ self`. On sparse spaces this can be very large.
    pub fn complement(&self) -> Relation {
        let mut b = self.builder_like();
        let mut row = BitSet::full(self.n);
        let full = BitSet::full(self.n);
        for i in 0..self.n {
            row.union_with(&full);
            for j in self.row(i) {
                row.remove(j);
            }
            b.push_words(row.words());
        }
        b.finish(self.space.clone())
    }

    pub fn is_subset(&self, other: &Relation) -> Result<bool> {
        self.check_same_space(other)?;
        Ok(self.first_pair_not_in(other).is_none())
    }

    /// The least pair (canonical order) of `self` that is not in `other`.
    pub fn first_pair_not_in(&self, other: &Relation) -> Option<(usize, usize)> {
        (0..self.n).find_map(|i| self.row(i).find(|&j| !other.contains(i, j)).map(|j| (i, j)))
    }

    /// Relational product `self ∘ other`.
    pub fn compose(&self, other: &Relation) -> Result<Relation> {
        self.check_same_space(other)?;
        let mut b = self.builder_like();
        let wpr = words_for(self.n);
        if self.is_dense() && other.is_dense() {
            let mut acc = vec![0u64; wpr];
            for i in 0..self.n {
                acc.iter_mut().for_each(|w| *w = 0);
                for j in self.row(i) {
                    for (a, &w) in acc.iter_mut().zip(other.row_words(j).unwrap()) {
                        *a |= w;
                    }
                }
                b.push_words(&acc);
            }
        } else {
            let mut scratch = Scratch::new(self.n);
            let mut buf = Vec::new();
            for i in 0..self.n {
                for j in self.row(i) {
                    for k in other.row(j) {
                        scratch.insert(k);
                    }
                }
                b.push_scratch(&mut scratch, &mut buf);
            }
        }
        Ok(b.finish(self.space.clone()))
    }

    /// The converse relation: every pair transposed.
    pub fn converse(&self) -> Relation {
        let n = self.n;
        let mut counts = vec![0usize; n + 1];
        for (_, j) in self.pairs() {
            counts[j + 1] += 1;
        }
        for k in 0..n {
            counts[k + 1] += counts[k];
        }
        let mut fill = counts.clone();
        let mut cols = vec![0u32; counts[n]];
        // Sources are visited in ascending order, so every row comes out sorted.
        for (i, j) in self.pairs() {
            cols[fill[j]] = i as u32;
            fill[j] += 1;
        }
        let sparse = Relation {
            space: self.space.clone(),
            n,
            repr: Repr::Sparse { offsets: counts, cols },
        };
        if self.is_dense() {
            sparse.to_dense()
        } else {
            sparse
        }
    }

    /// Reflexive transitive closure `R*`, the least reflexive and transitive
    /// relation containing `self`. Computed as per-source reachability.
    pub fn rt_closure(&self) -> Relation {
        let mut b = self.builder_like();
        let mut seen = Scratch::new(self.n);
        let mut stack: Vec<usize> = Vec::new();
        let mut buf = Vec::new();
        for i in 0..self.n {
            seen.insert(i);
            stack.push(i);
            while let Some(u) = stack.pop() {
                for v in self.row(u) {
                    if seen.insert(v) {
                        stack.push(v);
                    }
                }
            }
            b.push_scratch(&mut seen, &mut buf);
        }
        b.finish(self.space.clone())
    }

    /// `dom(R) = {s | ∃s': (s,s') ∈ R}`.
    pub fn domain(&self) -> StateSet {
        let mut bits = BitSet::new(self.n);
        for i in 0..self.n {
            if !self.row_is_empty(i) {
                bits.insert(i);
            }
        }
        StateSet::from_bits(self.space.clone(), bits)
    }

    /// Range of the relation, the domain of its converse.
    pub fn range(&self) -> StateSet {
        let mut bits = BitSet::new(self.n);
        for (_, j) in self.pairs() {
            bits.insert(j);
        }
        StateSet::from_bits(self.space.clone(), bits)
    }

    pub fn is_deterministic(&self) -> bool {
        self.first_nondeterministic().is_none()
    }

    /// Least state with two or more images.
    pub fn first_nondeterministic(&self) -> Option<usize> {
        (0..self.n).find(|&i| self.row(i).nth(1).is_some())
    }

    /// `A∘L ∩ R` written structurally: keeps the rows whose source is in `set`.
    pub fn restrict_rows(&self, set: &StateSet) -> Result<Relation> {
        self.check_set(set)?;
        let mut b = self.builder_like();
        for i in 0..self.n {
            if set.contains(i) {
                b.push_sorted(self.row(i));
            } else {
                b.push_sorted(std::iter::empty());
            }
        }
        Ok(b.finish(self.space.clone()))
    }

    /// `R ∩ converse(A∘L)`: keeps the pairs whose target is in `set`.
    pub fn restrict_cols(&self, set: &StateSet) -> Result<Relation> {
        self.check_set(set)?;
        let mut b = self.builder_like();
        let mut buf = Vec::new();
        for i in 0..self.n {
            buf.clear();
            buf.extend(self.row(i).filter(|&j| set.contains(j)));
            b.push_sorted(buf.iter().copied());
        }
        Ok(b.finish(self.space.clone()))
    }

    fn check_set(&self, set: &StateSet) -> Result<()> {
        if *set.space() == self.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                left: self.space.name().to_string(),
                right: set.space().name().to_string(),
            })
        }
    }

    /// Existential projection onto `outer` when the last variables of this
    /// space are `m` combinations of block locals: `(s,s')` is kept iff some
    /// `((s,x),(s',x'))` is present.
    pub(crate) fn project_locals(&self, outer: Arc<StateSpace>, m: usize, limits: &Limits) -> Relation {
        let n = space_len(&outer);
        debug_assert_eq!(n * m, self.n);
        let mut b = RowBuilder::for_limits(n, limits);
        let mut seen = Scratch::new(n);
        let mut buf = Vec::new();
        for s in 0..n {
            for i in s * m..(s + 1) * m {
                for j in self.row(i) {
                    seen.insert(j / m);
                }
            }
            b.push_scratch(&mut seen, &mut buf);
        }
        b.finish(outer)
    }

    /// Image set of a single state.
    pub fn image(&self, i: usize) -> Vec<usize> {
        self.row(i).collect()
    }
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        if *self.space != *other.space {
            return false;
        }
        match (&self.repr, &other.repr) {
            (Repr::Dense { words: a, .. }, Repr::Dense { words: b, .. }) => a == b,
            (Repr::Sparse { offsets: oa, cols: ca }, Repr::Sparse { offsets: ob, cols: cb }) => oa == ob && ca == cb,
            _ => (0..self.n).all(|i| self.row(i).eq(other.row(i))),
        }
    }
}

impl Eq for Relation {}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l = f.debug_set();
        for (i, j) in self.pairs() {
            l.entry(&(self.space.state_at(i), self.space.state_at(j)));
        }
        l.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relcore::space::VarDecl;

    fn line(n: i64) -> Arc<StateSpace> {
        StateSpace::new("S", vec![VarDecl::new("s", 0, n - 1)])
            .unwrap()
            .shared()
    }

    fn rel(space: &Arc<StateSpace>, pairs: &[(usize, usize)]) -> Relation {
        Relation::from_pairs(space.clone(), pairs.iter().copied()).unwrap()
    }

    #[test]
    fn union_with_complement_is_universal() {
        let s = line(5);
        let a = rel(&s, &[(0, 1), (3, 3), (4, 0)]);
        assert_eq!(a.union(&a.complement()).unwrap(), Relation::universal(s.clone()));
        let sp = a.to_sparse();
        assert_eq!(sp.union(&sp.complement()).unwrap(), Relation::universal(s));
    }

    #[test]
    fn fig2_intersection() {
        let s = line(8);
        let r = rel(
            &s,
            &[
                (0, 0),
                (0, 1),
                (1, 0),
                (1, 1),
                (1, 2),
                (2, 1),
                (2, 2),
                (2, 3),
                (3, 2),
                (3, 3),
                (3, 4),
                (4, 3),
                (4, 4),
                (4, 5),
                (5, 4),
                (5, 5),
            ],
        );
        let p = rel(
            &s,
            &[
                (0, 2),
                (0, 3),
                (1, 3),
                (1, 4),
                (2, 0),
                (2, 1),
                (3, 1),
                (3, 2),
                (4, 1),
                (4, 2),
                (5, 2),
                (5, 3),
            ],
        );
        assert_eq!(r.intersection(&p).unwrap(), rel(&s, &[(2, 1), (3, 2)]));
    }

    #[test]
    fn compose_with_universal_gives_vector() {
        let s = line(6);
        let a = rel(&s, &[(2, 1), (3, 2)]);
        let v = a.compose(&Relation::universal(s.clone())).unwrap();
        let expect: Vec<_> = [2, 3].iter().flat_map(|&i| (0..6).map(move |j| (i, j))).collect();
        assert_eq!(v, rel(&s, &expect));
    }

    #[test]
    fn compose_identity_is_neutral() {
        let s = line(4);
        let a = rel(&s, &[(0, 3), (1, 1), (1, 2)]);
        assert_eq!(a.compose(&Relation::identity(s.clone())).unwrap(), a);
        assert_eq!(Relation::identity(s).compose(&a).unwrap(), a);
    }

    #[test]
    fn converse_unfolds_definition() {
        let s = line(3);
        let a = rel(&s, &[(1, 0), (1, 2)]);
        assert_eq!(a.converse(), rel(&s, &[(0, 1), (2, 1)]));
        assert_eq!(Relation::identity(s.clone()).converse(), Relation::identity(s));
    }

    #[test]
    fn closure_of_empty_is_identity() {
        let s = line(4);
        assert_eq!(Relation::empty(s.clone()).rt_closure(), Relation::identity(s));
    }

    #[test]
    fn closure_of_chain() {
        let s = line(3);
        let a = rel(&s, &[(0, 1), (1, 2)]);
        let expect = rel(&s, &[(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)]);
        assert_eq!(a.rt_closure(), expect);
        assert_eq!(a.to_sparse().rt_closure(), expect);
    }

    #[test]
    fn domain_and_range() {
        let s = line(4);
        let r = rel(&s, &[(1, 0), (1, 1), (1, 2), (2, 1), (2, 2), (2, 3)]);
        assert_eq!(r.domain().indices().collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(r.range().indices().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        assert!(Relation::empty(s).domain().is_empty());
    }

    #[test]
    fn determinism() {
        let s = line(8);
        assert!(Relation::identity(s.clone()).is_deterministic());
        let pp = rel(&s, &[(0, 2), (0, 3), (1, 2)]);
        assert!(!pp.is_deterministic());
        assert_eq!(pp.first_nondeterministic(), Some(0));
    }

    #[test]
    fn space_mismatch_names_both_spaces() {
        let a = Relation::empty(line(3));
        let b = Relation::empty(StateSpace::new("T", vec![VarDecl::new("t", 0, 2)]).unwrap().shared());
        let err = a.union(&b).unwrap_err().to_string();
        assert!(err.contains("`S`") && err.contains("`T`"), "{err}");
    }

    #[test]
    fn dense_and_sparse_compare_equal() {
        let s = line(10);
        let a = rel(&s, &[(0, 9), (5, 5), (9, 0)]);
        assert!(a.is_dense());
        assert_eq!(a, a.to_sparse());
        assert_eq!(a.to_sparse().to_dense(), a);
    }

    #[test]
    fn restrictions_match_vector_formulas() {
        let s = line(5);
        let a = rel(&s, &[(0, 1), (1, 4), (2, 2), (4, 0), (4, 3)]);
        let set = StateSet::from_indices(s.clone(), [1, 4]).unwrap();
        let vec_a = set.vector();
        assert_eq!(a.restrict_rows(&set).unwrap(), vec_a.intersection(&a).unwrap());
        assert_eq!(
            a.restrict_cols(&set).unwrap(),
            a.intersection(&vec_a.converse()).unwrap()
        );
    }
}
