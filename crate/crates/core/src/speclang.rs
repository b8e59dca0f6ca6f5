//! Specifications: predicates over initial (`x`) and final (`x'`) variables.
//!
//! A specification file declares its space, the predicate, and optionally a
//! closed form of the predicate's domain:
//!
//! ```text
//! space fermat:
//!   nat n : 0..24;
//!   nat x : 0..10;
//!   nat y : 0..10;
//! spec: n == x'*x' - y'*y' && 0 <= y' && y' <= x';
//! domain: n % 2 == 1 || n % 4 == 0;
//! ```

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::region::Region;
use crate::relcore::{format_tuple, Limits, Relation, RowBuilder, StateSet, StateSpace};
use crate::syntax::expr::{self, resolve_in, BoolExpr, Slot};
use crate::syntax::lexer::Cursor;
use crate::syntax::{at_decl, parse_decl};

/// A parsed, unbound specification predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecExpr {
    pub ast: BoolExpr,
}

impl SpecExpr {
    pub fn parse(src: &str) -> Result<SpecExpr> {
        Ok(SpecExpr {
            ast: expr::parse_bool_expr(src)?,
        })
    }

    /// Resolves variables against `space`; unknown names are errors.
    pub fn bind(&self, space: &Arc<StateSpace>) -> Result<BoundSpec> {
        Ok(BoundSpec {
            space: space.clone(),
            pred: self.ast.try_map_vars(&mut resolve_in(space))?,
            source: self.clone(),
        })
    }

    pub fn mentions_primed(&self) -> bool {
        let mut any = false;
        self.ast.for_each_var(&mut |v| any |= v.primed);
        any
    }
}

impl fmt::Display for SpecExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ast.fmt(f)
    }
}

/// A predicate bound to a space: the intensional form of a relation.
#[derive(Clone, Debug)]
pub struct BoundSpec {
    space: Arc<StateSpace>,
    pred: BoolExpr<Slot>,
    source: SpecExpr,
}

impl BoundSpec {
    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn source(&self) -> &SpecExpr {
        &self.source
    }

    /// Membership of `(s, s2)`.
    #[inline]
    pub fn holds(&self, s: &[i64], s2: &[i64]) -> bool {
        self.pred.eval(s, s2)
    }

    /// Variables whose primed form occurs in the predicate.
    pub fn primed_vars(&self) -> Vec<usize> {
        let mut v = Vec::new();
        self.pred.for_each_var(&mut |s| {
            if s.primed && !v.contains(&s.index) {
                v.push(s.index);
            }
        });
        v.sort_unstable();
        v
    }
}

/// Membership oracle for intensional relations.
pub fn holds(spec: &BoundSpec, s: &[i64], s2: &[i64]) -> bool {
    spec.holds(s, s2)
}

/// The relation `{(s,s') | holds(spec, s, s')}`.
pub fn materialize(spec: &BoundSpec, limits: &Limits) -> Result<Relation> {
    let space = spec.space.clone();
    limits.check(&space, &format!("specification space `{}`", space.name()))?;
    let n = space.len().unwrap();
    let states: Vec<Vec<i64>> = space.states().collect();
    let mut b = RowBuilder::for_limits(n, limits);
    let mut row = Vec::new();
    for s in &states {
        row.clear();
        row.extend((0..n).filter(|&j| spec.holds(s, &states[j])));
        b.push_sorted(row.iter().copied());
    }
    Ok(b.finish(space))
}

/// A specification file: space, predicate, optional domain clause.
#[derive(Clone, Debug)]
pub struct SpecFile {
    pub space: Arc<StateSpace>,
    pub spec: BoundSpec,
    pub domain: Option<BoundSpec>,
}

impl SpecFile {
    /// Evaluates the domain clause at `s`, if there is one.
    pub fn domain_clause(&self, s: &[i64]) -> Option<bool> {
        self.domain.as_ref().map(|d| d.holds(s, s))
    }

    pub fn materialize(&self, limits: &Limits) -> Result<Relation> {
        materialize(&self.spec, limits)
    }

    /// The state set described by the domain clause.
    pub fn domain_set(&self, limits: &Limits) -> Result<Option<StateSet>> {
        let Some(d) = &self.domain else { return Ok(None) };
        limits.check(&self.space, &format!("specification space `{}`", self.space.name()))?;
        Ok(Some(StateSet::from_predicate(self.space.clone(), |s| d.holds(s, s))))
    }
}

fn parse_space_block(c: &mut Cursor) -> Result<Arc<StateSpace>> {
    c.expect_keyword("space")?;
    let name = match c.peek() {
        crate::syntax::lexer::Tok::Ident(_) => c.expect_ident()?.0,
        _ => "spec".to_string(),
    };
    let braced = if c.eat_sym("{") {
        true
    } else {
        c.expect_sym(":")?;
        false
    };
    let mut vars = Vec::new();
    while at_decl(c) {
        vars.extend(parse_decl(c, None)?.into_iter().map(|(d, _)| d));
    }
    if braced {
        c.expect_sym("}")?;
    }
    if vars.is_empty() {
        return c.error("space declares no variables");
    }
    Ok(StateSpace::new(name, vars)?.shared())
}

/// Parses a `.space` file: `space name { nat x : 0..6; ... }`.
pub fn parse_space(src: &str) -> Result<Arc<StateSpace>> {
    let mut c = Cursor::new(src)?;
    let space = parse_space_block(&mut c)?;
    c.expect_eof()?;
    Ok(space)
}

/// Parses and binds a specification file.
pub fn parse_spec(src: &str) -> Result<SpecFile> {
    let mut c = Cursor::new(src)?;
    let space = parse_space_block(&mut c)?;
    c.expect_keyword("spec")?;
    c.expect_sym(":")?;
    let pred = SpecExpr {
        ast: expr::parse_bool(&mut c)?,
    };
    c.expect_sym(";")?;
    let spec = pred.bind(&space)?;
    let domain = if c.eat_keyword("domain") {
        c.expect_sym(":")?;
        let ast = expr::parse_bool(&mut c)?;
        c.expect_sym(";")?;
        let mut primed = None;
        ast.for_each_var(&mut |v| {
            if v.primed && primed.is_none() {
                primed = Some(v.clone());
            }
        });
        if let Some(v) = primed {
            return Err(Error::Semantic {
                pos: v.pos,
                msg: format!("domain clause may only mention initial-state variables, found `{v}`"),
            });
        }
        Some(SpecExpr { ast }.bind(&space)?)
    } else {
        None
    };
    c.expect_eof()?;
    Ok(SpecFile { space, spec, domain })
}

/// Per-variable search bounds for final-state witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessBounds {
    bounds: Vec<(i64, i64)>,
}

impl WitnessBounds {
    /// The declared ranges themselves: a search within them is exhaustive.
    pub fn declared(space: &StateSpace) -> Self {
        WitnessBounds {
            bounds: space.vars().iter().map(|v| (v.lo, v.hi)).collect(),
        }
    }

    /// `x=0..200, y=0..200`; unmentioned variables keep their declared range.
    /// Bounds are clipped to the declared ranges.
    pub fn parse(space: &StateSpace, text: &str) -> Result<Self> {
        let mut wb = WitnessBounds::declared(space);
        for item in text.split([',', ';']) {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (name, range) = item
                .split_once('=')
                .ok_or_else(|| Error::Manifest(format!("bound `{item}` is not `var=lo..hi`")))?;
            let idx = space
                .var_index(name.trim())
                .ok_or_else(|| Error::Manifest(format!("bound names unknown variable `{}`", name.trim())))?;
            let vals = crate::region::parse_values(range)?;
            let d = &space.vars()[idx];
            let lo = (*vals.first().unwrap()).max(d.lo);
            let hi = (*vals.last().unwrap()).min(d.hi);
            wb.bounds[idx] = (lo, hi);
        }
        Ok(wb)
    }

    pub fn get(&self, var: usize) -> (i64, i64) {
        self.bounds[var]
    }

    /// True when the bounds for `vars` cover the declared ranges, so a
    /// failed search proves that no witness exists.
    pub fn exhaustive_for(&self, space: &StateSpace, vars: &[usize]) -> bool {
        vars.iter().all(|&i| {
            let d = &space.vars()[i];
            self.bounds[i].0 <= d.lo && self.bounds[i].1 >= d.hi
        })
    }
}

/// Searches for `s'` with `holds(spec, s, s')`, varying only the variables
/// whose primed form occurs in the predicate (the others are unconstrained
/// and copied from `s`).
pub fn find_witness(spec: &BoundSpec, s: &[i64], bounds: &WitnessBounds) -> Option<Vec<i64>> {
    let vars = spec.primed_vars();
    let mut post = s.to_vec();
    for &v in &vars {
        let (lo, hi) = bounds.get(v);
        if lo > hi {
            return None;
        }
        post[v] = lo;
    }
    loop {
        if spec.holds(s, &post) {
            return Some(post);
        }
        let mut k = vars.len();
        loop {
            if k == 0 {
                return None;
            }
            k -= 1;
            let v = vars[k];
            let (lo, hi) = bounds.get(v);
            if post[v] < hi {
                post[v] += 1;
                break;
            }
            post[v] = lo;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DomainViolation {
    /// The clause accepts `state` but no final state satisfies the predicate.
    NoWitness { state: Vec<i64> },
    /// The clause rejects `state` yet `witness` satisfies the predicate.
    UnexpectedWitness { state: Vec<i64>, witness: Vec<i64> },
}

impl fmt::Display for DomainViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainViolation::NoWitness { state } => {
                write!(
                    f,
                    "{}: domain clause holds but no final state satisfies the spec",
                    format_tuple(state)
                )
            }
            DomainViolation::UnexpectedWitness { state, witness } => write!(
                f,
                "{}: domain clause fails but {} satisfies the spec",
                format_tuple(state),
                format_tuple(witness)
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DomainStatus {
    NothingToValidate,
    Checked,
}

#[derive(Clone, Debug)]
pub struct DomainReport {
    pub status: DomainStatus,
    pub checked: usize,
    pub violations: Vec<DomainViolation>,
    /// States where the clause holds but the bounded search found no
    /// witness and the bounds do not cover the declared ranges.
    pub inconclusive: Vec<Vec<i64>>,
}

impl DomainReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.inconclusive.is_empty()
    }
}

/// Checks the domain clause against bounded witness search over `region`.
pub fn validate_domain_clause(spec: &SpecFile, region: &Region, bounds: &WitnessBounds) -> DomainReport {
    let Some(domain) = &spec.domain else {
        return DomainReport {
            status: DomainStatus::NothingToValidate,
            checked: 0,
            violations: Vec::new(),
            inconclusive: Vec::new(),
        };
    };
    let exhaustive = bounds.exhaustive_for(&spec.space, &spec.spec.primed_vars());
    let mut report = DomainReport {
        status: DomainStatus::Checked,
        checked: 0,
        violations: Vec::new(),
        inconclusive: Vec::new(),
    };
    for s in region.iter() {
        report.checked += 1;
        let claimed = domain.holds(&s, &s);
        match (claimed, find_witness(&spec.spec, &s, bounds)) {
            (true, Some(_)) | (false, None) => {}
            (true, None) if exhaustive => report.violations.push(DomainViolation::NoWitness { state: s }),
            (true, None) => report.inconclusive.push(s),
            (false, Some(witness)) => report
                .violations
                .push(DomainViolation::UnexpectedWitness { state: s, witness }),
        }
    }
    report
}
