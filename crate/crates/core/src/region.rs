//! Initial-state regions: a value list per variable, enumerated as a product.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::relcore::{StateSet, StateSpace};

/// A product of per-variable value lists over a space. Variables with a
/// single value are pinned; the others are enumerated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    space: Arc<StateSpace>,
    axes: Vec<Vec<i64>>,
}

impl Region {
    /// Every state of the space.
    pub fn full(space: Arc<StateSpace>) -> Self {
        let axes = space.vars().iter().map(|v| (v.lo..=v.hi).collect()).collect();
        Region { space, axes }
    }

    pub fn new(space: Arc<StateSpace>, axes: Vec<Vec<i64>>) -> Result<Self> {
        if axes.len() != space.arity() {
            return Err(Error::Manifest(format!(
                "region has {} axes, space `{}` has {} variables",
                axes.len(),
                space.name(),
                space.arity()
            )));
        }
        let mut axes = axes;
        for (decl, vals) in space.vars().iter().zip(axes.iter_mut()) {
            vals.sort_unstable();
            vals.dedup();
            if vals.is_empty() {
                return Err(Error::Manifest(format!("region gives no values for `{}`", decl.name)));
            }
            if let Some(v) = vals.iter().find(|v| !decl.contains(**v)) {
                return Err(Error::Manifest(format!(
                    "region value {v} for `{}` is outside its range {}..{}",
                    decl.name, decl.lo, decl.hi
                )));
            }
        }
        Ok(Region { space, axes })
    }

    /// Parses `n=1..10000, x=0, y={0,2,4}`. Variables not mentioned are
    /// pinned to the low end of their range.
    pub fn parse(space: Arc<StateSpace>, text: &str) -> Result<Self> {
        let mut axes: Vec<Option<Vec<i64>>> = vec![None; space.arity()];
        for item in split_top_level(text) {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (name, spec) = item
                .split_once('=')
                .ok_or_else(|| Error::Manifest(format!("region item `{item}` is not `var=values`")))?;
            let name = name.trim();
            let idx = space
                .var_index(name)
                .ok_or_else(|| Error::Manifest(format!("region names unknown variable `{name}`")))?;
            if axes[idx].is_some() {
                return Err(Error::Manifest(format!("region mentions `{name}` twice")));
            }
            axes[idx] = Some(parse_values(spec.trim())?);
        }
        let axes = axes
            .into_iter()
            .zip(space.vars())
            .map(|(a, d)| a.unwrap_or_else(|| vec![d.lo]))
            .collect();
        Region::new(space, axes)
    }

    pub fn from_state_set(set: &StateSet) -> RegionList {
        RegionList {
            space: set.space().clone(),
            states: set.states().collect(),
        }
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn axes(&self) -> &[Vec<i64>] {
        &self.axes
    }

    /// Number of states in the region.
    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Indices of variables that take more than one value.
    pub fn enumerated(&self) -> Vec<usize> {
        (0..self.axes.len()).filter(|&i| self.axes[i].len() > 1).collect()
    }

    /// Indices of pinned variables.
    pub fn pinned(&self) -> Vec<usize> {
        (0..self.axes.len()).filter(|&i| self.axes[i].len() == 1).collect()
    }

    /// The `k`-th state in enumeration order (last variable fastest).
    pub fn state_at(&self, mut k: usize) -> Vec<i64> {
        let mut out = vec![0; self.axes.len()];
        for i in (0..self.axes.len()).rev() {
            let w = self.axes[i].len();
            out[i] = self.axes[i][k % w];
            k /= w;
        }
        out
    }

    pub fn position_of(&self, state: &[i64]) -> Option<usize> {
        if state.len() != self.axes.len() {
            return None;
        }
        let mut k = 0;
        for (axis, v) in self.axes.iter().zip(state) {
            k = k * axis.len() + axis.binary_search(v).ok()?;
        }
        Some(k)
    }

    pub fn contains(&self, state: &[i64]) -> bool {
        self.position_of(state).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.len()).map(move |k| self.state_at(k))
    }

    /// The same region with pinned variables set to `values` (indexed like the space).
    pub fn with_pinned(&self, values: &[i64]) -> Region {
        let axes = self
            .axes
            .iter()
            .zip(values)
            .map(|(a, &v)| if a.len() == 1 { vec![v] } else { a.clone() })
            .collect();
        Region {
            space: self.space.clone(),
            axes,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (d, a)) in self.space.vars().iter().zip(&self.axes).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            let contiguous = a.windows(2).all(|w| w[1] == w[0] + 1);
            if a.len() == 1 {
                write!(f, "{}={}", d.name, a[0])?;
            } else if contiguous {
                write!(f, "{}={}..{}", d.name, a[0], a[a.len() - 1])?;
            } else {
                let vals: Vec<_> = a.iter().map(|v| v.to_string()).collect();
                write!(f, "{}={{{}}}", d.name, vals.join(","))?;
            }
        }
        Ok(())
    }
}

/// An explicit list of states, for regions that are not products.
#[derive(Clone, Debug)]
pub struct RegionList {
    pub space: Arc<StateSpace>,
    pub states: Vec<Vec<i64>>,
}

fn split_top_level(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0, 0);
    for (i, ch) in text.char_indices() {
        match ch {
            '{' | '[' => depth += 1,
            '}' | ']' => depth -= 1,
            ',' | ';' if depth == 0 => {
                out.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out
}

fn parse_int(s: &str) -> Result<i64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Manifest(format!("`{s}` is not an integer")))
}

/// `5`, `1..10`, or `{1,3,5}` (brackets also accepted).
pub fn parse_values(spec: &str) -> Result<Vec<i64>> {
    let spec = spec.trim();
    if let Some(inner) = spec
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .or_else(|| spec.strip_prefix('[').and_then(|s| s.strip_suffix(']')))
    {
        return inner
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(parse_int)
            .collect();
    }
    if let Some((lo, hi)) = spec.split_once("..") {
        let (lo, hi) = (parse_int(lo)?, parse_int(hi)?);
        if lo > hi {
            return Err(Error::Manifest(format!("empty range {lo}..{hi}")));
        }
        return Ok((lo..=hi).collect());
    }
    Ok(vec![parse_int(spec)?])
}
