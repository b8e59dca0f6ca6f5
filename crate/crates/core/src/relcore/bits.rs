//! Fixed-width bitset used for state sets and dense relation rows.

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitSet {
    words: Vec<u64>,
    len: usize,
}

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = BitSet {
            words: vec![!0; words_for(len)],
            len,
        };
        s.mask_tail();
        s
    }

    pub(crate) fn from_words(words: Vec<u64>, len: usize) -> Self {
        debug_assert_eq!(words.len(), words_for(len));
        let mut s = BitSet { words, len };
        s.mask_tail();
        s
    }

    fn mask_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// Universe size (not the number of members).
    pub fn capacity(&self) -> usize {
        self.len
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let w = &mut self.words[i / 64];
        let fresh = *w >> (i % 64) & 1 == 0;
        *w |= 1 << (i % 64);
        fresh
    }

    pub fn remove(&mut self, i: usize) {
        if i < self.len {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn iter(&self) -> Ones<'_> {
        Ones::new(&self.words)
    }

    pub fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn subtract(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn complement(&self) -> BitSet {
        BitSet::from_words(self.words.iter().map(|w| !w).collect(), self.len)
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }
}

/// Iterator over the set bits of a word slice, ascending.
pub struct Ones<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl<'a> Ones<'a> {
    pub(crate) fn new(words: &'a [u64]) -> Self {
        Ones {
            words,
            idx: 0,
            cur: words.first().copied().unwrap_or(0),
        }
    }
}

impl Iterator for Ones<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let tz = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * 64 + tz);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

/// A reusable scratch row: a bitset plus the list of touched positions,
/// so clearing costs only what was inserted.
pub(crate) struct Scratch {
    bits: Vec<u64>,
    touched: Vec<u32>,
}

impl Scratch {
    pub fn new(n: usize) -> Self {
        Scratch {
            bits: vec![0; words_for(n)],
            touched: Vec::new(),
        }
    }

    #[inline]
    pub fn insert(&mut self, i: usize) -> bool {
        let w = &mut self.bits[i / 64];
        let m = 1u64 << (i % 64);
        if *w & m == 0 {
            *w |= m;
            self.touched.push(i as u32);
            true
        } else {
            false
        }
    }

    /// Sorted members; the scratch is cleared afterwards.
    pub fn drain_sorted(&mut self, out: &mut Vec<u32>) {
        self.touched.sort_unstable();
        for &i in &self.touched {
            self.bits[i as usize / 64] = 0;
        }
        out.extend_from_slice(&self.touched);
        self.touched.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_masks_tail() {
        let s = BitSet::full(70);
        assert_eq!(s.count(), 70);
        assert!(!s.contains(70));
        assert_eq!(s.complement().count(), 0);
    }

    #[test]
    fn ones_iterates_ascending() {
        let mut s = BitSet::new(200);
        for i in [3, 64, 65, 199, 0] {
            s.insert(i);
        }
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 3, 64, 65, 199]);
    }

    #[test]
    fn scratch_drains_sorted_and_clears() {
        let mut sc = Scratch::new(100);
        for i in [50, 2, 99, 2] {
            sc.insert(i);
        }
        let mut out = Vec::new();
        sc.drain_sorted(&mut out);
        assert_eq!(out, vec![2, 50, 99]);
        sc.insert(7);
        out.clear();
        sc.drain_sorted(&mut out);
        assert_eq!(out, vec![7]);
    }
}
