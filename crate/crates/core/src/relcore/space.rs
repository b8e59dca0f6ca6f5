use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default cap on the number of states for exhaustive (relational) work.
pub const DEFAULT_MAX_STATES: usize = 1 << 16;
/// Default dense-matrix budget, in bits of adjacency matrix.
pub const DEFAULT_DENSE_BUDGET_BITS: u64 = 1 << 26;

/// Resource limits for exhaustive computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_states: usize,
    pub dense_budget_bits: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: DEFAULT_MAX_STATES,
            dense_budget_bits: DEFAULT_DENSE_BUDGET_BITS,
        }
    }
}

impl Limits {
    pub fn with_max_states(max_states: usize) -> Self {
        Limits {
            max_states,
            ..Limits::default()
        }
    }

    /// Fails unless `space` can be enumerated under these limits.
    pub fn check(&self, space: &StateSpace, what: &str) -> Result<()> {
        if space.size() > self.max_states as u128 {
            return Err(Error::CapExceeded {
                what: what.to_string(),
                size: space.size(),
                cap: self.max_states,
            });
        }
        Ok(())
    }

    pub(crate) fn prefers_dense(&self, n: usize) -> bool {
        (n as u128) * (n as u128) <= self.dense_budget_bits as u128
    }
}

/// A program variable with an inclusive integer range.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarDecl {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
}

impl VarDecl {
    pub fn new(name: impl Into<String>, lo: i64, hi: i64) -> Self {
        VarDecl {
            name: name.into(),
            lo,
            hi,
        }
    }

    pub fn width(&self) -> u128 {
        (self.hi as i128 - self.lo as i128 + 1) as u128
    }

    pub fn contains(&self, v: i64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

impl fmt::Display for VarDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {}..{}", self.name, self.lo, self.hi)
    }
}

/// The cartesian product of the declared variable ranges.
///
/// States are numbered in mixed radix, declaration order, last variable
/// fastest. The index is only available for spaces small enough to fit a
/// `usize`; larger spaces can still be used pointwise (oracle mode).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StateSpace {
    name: String,
    vars: Vec<VarDecl>,
    strides: Vec<u128>,
    size: u128,
}

impl StateSpace {
    pub fn new(name: impl Into<String>, vars: Vec<VarDecl>) -> Result<Self> {
        let name = name.into();
        for (i, v) in vars.iter().enumerate() {
            if v.lo > v.hi {
                return Err(Error::InvalidSpace(format!(
                    "variable `{}` has empty range {}..{}",
                    v.name, v.lo, v.hi
                )));
            }
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::InvalidSpace(format!("variable `{}` declared twice", v.name)));
            }
        }
        let mut strides = vec![0u128; vars.len()];
        let mut size: u128 = 1;
        for (i, v) in vars.iter().enumerate().rev() {
            strides[i] = size;
            size = size
                .checked_mul(v.width())
                .filter(|s| *s <= u64::MAX as u128)
                .ok_or_else(|| Error::InvalidSpace(format!("space `{name}` has too many states to index")))?;
        }
        Ok(StateSpace {
            name,
            vars,
            strides,
            size,
        })
    }

    pub fn shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vars(&self) -> &[VarDecl] {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    /// Total number of states.
    pub fn size(&self) -> u128 {
        self.size
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn contains(&self, values: &[i64]) -> bool {
        values.len() == self.vars.len() && self.vars.iter().zip(values).all(|(d, &v)| d.contains(v))
    }

    /// Canonical index of a state.
    pub fn index_of(&self, values: &[i64]) -> Result<usize> {
        if !self.contains(values) {
            return Err(Error::StateOutOfSpace {
                state: format_tuple(values),
                space: self.name.clone(),
            });
        }
        let mut idx: u128 = 0;
        for ((d, &v), &stride) in self.vars.iter().zip(values).zip(&self.strides) {
            idx += (v - d.lo) as u128 * stride;
        }
        usize::try_from(idx).map_err(|_| Error::InvalidSpace(format!("space `{}` is too large to index", self.name)))
    }

    /// Decodes a canonical index into variable values.
    pub fn state_at(&self, mut index: usize) -> Vec<i64> {
        let mut out = vec![0; self.vars.len()];
        for (i, d) in self.vars.iter().enumerate().rev() {
            let w = d.width() as usize;
            out[i] = d.lo + (index % w) as i64;
            index /= w;
        }
        out
    }

    pub(crate) fn stride(&self, var: usize) -> usize {
        self.strides[var] as usize
    }

    /// Number of states as a `usize`, if the space is indexable at all.
    pub fn len(&self) -> Option<usize> {
        usize::try_from(self.size).ok()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Appends `locals` to the variable list (they vary fastest).
    pub fn extend(&self, name: impl Into<String>, locals: &[VarDecl]) -> Result<StateSpace> {
        let mut vars = self.vars.clone();
        vars.extend(locals.iter().cloned());
        StateSpace::new(name, vars)
    }

    /// Iterates every state in canonical order.
    pub fn states(&self) -> StateIter<'_> {
        StateIter::new(&self.vars)
    }

    pub fn format_state(&self, values: &[i64]) -> String {
        format_tuple(values)
    }
}

impl fmt::Display for StateSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "space {} {{", self.name)?;
        for v in &self.vars {
            write!(f, " var {};", v)?;
        }
        write!(f, " }}")
    }
}

/// Renders `(v1,...,vk)`, the tuple syntax of relation literals.
pub fn format_tuple(values: &[i64]) -> String {
    let mut s = String::with_capacity(values.len() * 4 + 2);
    s.push('(');
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&v.to_string());
    }
    s.push(')');
    s
}

/// Odometer over the product of variable ranges, last variable fastest.
pub struct StateIter<'a> {
    vars: &'a [VarDecl],
    cur: Vec<i64>,
    done: bool,
}

impl<'a> StateIter<'a> {
    fn new(vars: &'a [VarDecl]) -> Self {
        StateIter {
            vars,
            cur: vars.iter().map(|v| v.lo).collect(),
            done: false,
        }
    }

    /// The current state without allocating; `None` once exhausted.
    pub fn current(&self) -> Option<&[i64]> {
        if self.done {
            None
        } else {
            Some(&self.cur)
        }
    }

    /// Steps to the next state; returns false at the end.
    pub fn advance(&mut self) -> bool {
        for i in (0..self.vars.len()).rev() {
            if self.cur[i] < self.vars[i].hi {
                self.cur[i] += 1;
                return true;
            }
            self.cur[i] = self.vars[i].lo;
        }
        self.done = true;
        false
    }
}

impl Iterator for StateIter<'_> {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        self.advance();
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> StateSpace {
        StateSpace::new("xy", vec![VarDecl::new("x", 0, 2), VarDecl::new("y", -1, 1)]).unwrap()
    }

    #[test]
    fn index_is_mixed_radix_last_fastest() {
        let s = xy();
        assert_eq!(s.size(), 9);
        assert_eq!(s.index_of(&[0, -1]).unwrap(), 0);
        assert_eq!(s.index_of(&[0, 0]).unwrap(), 1);
        assert_eq!(s.index_of(&[1, -1]).unwrap(), 3);
        assert_eq!(s.index_of(&[2, 1]).unwrap(), 8);
    }

    #[test]
    fn index_round_trips() {
        let s = xy();
        for (i, st) in s.states().enumerate() {
            assert_eq!(s.index_of(&st).unwrap(), i);
            assert_eq!(s.state_at(i), st);
        }
    }

    #[test]
    fn rejects_bad_declarations() {
        assert!(StateSpace::new("a", vec![VarDecl::new("x", 1, 0)]).is_err());
        assert!(StateSpace::new("a", vec![VarDecl::new("x", 0, 1), VarDecl::new("x", 0, 1)]).is_err());
        let huge = (0..5).map(|i| VarDecl::new(format!("v{i}"), 0, 1 << 20)).collect();
        assert!(StateSpace::new("huge", huge).is_err());
    }

    #[test]
    fn out_of_range_state_is_rejected() {
        assert!(xy().index_of(&[3, 0]).is_err());
        assert!(xy().index_of(&[0]).is_err());
    }

    #[test]
    fn cap_check() {
        let s = xy();
        assert!(Limits::with_max_states(9).check(&s, "xy").is_ok());
        assert!(matches!(
            Limits::with_max_states(8).check(&s, "xy"),
            Err(Error::CapExceeded { size: 9, .. })
        ));
    }
}
