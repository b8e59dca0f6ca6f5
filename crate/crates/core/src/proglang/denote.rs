use std::sync::Arc;

use super::bind::{BStmt, BoundProgram};
use crate::error::{Error, Result};
use crate::relcore::{Limits, Relation, RowBuilder, StateSet, StateSpace, VarDecl};
use crate::syntax::expr::{BoolExpr, Slot};

/// The relation a program computes on its space, by structural recursion
/// over the relational rules of each construct.
pub fn denote(p: &BoundProgram, limits: &Limits) -> Result<Relation> {
    limits.check(
        p.space(),
        &format!("space `{}` of program `{}`", p.space().name(), p.name()),
    )?;
    Denoter {
        limits,
        program: p.name(),
    }
    .stmt(&p.body, p.space())
}

struct Denoter<'a> {
    limits: &'a Limits,
    program: &'a str,
}

fn test_set(space: &Arc<StateSpace>, cond: &BoolExpr<Slot>) -> StateSet {
    StateSet::from_predicate(space.clone(), |s| cond.eval(s, s))
}

impl Denoter<'_> {
    fn dense(&self, space: &StateSpace) -> bool {
        self.limits.prefers_dense(space.len().unwrap())
    }

    fn stmt(&self, s: &BStmt, space: &Arc<StateSpace>) -> Result<Relation> {
        Ok(match s {
            BStmt::Abort => Relation::empty_with(space.clone(), self.dense(space)),
            BStmt::Skip => Relation::identity_with(space.clone(), self.dense(space)),
            BStmt::Assign { slot, expr, lo, hi } => {
                // {(s,s') | s ∈ δ(E) ∧ s' = s[x := E(s)]}, where δ includes the range check.
                let n = space.len().unwrap();
                let stride = space.stride(*slot) as i64;
                let mut b = RowBuilder::for_limits(n, self.limits);
                let mut it = space.states();
                let mut i = 0i64;
                while let Some(st) = it.current() {
                    let target = expr
                        .eval(st, st)
                        .filter(|v| lo <= v && v <= hi)
                        .map(|v| (i + (v - st[*slot]) * stride) as usize);
                    b.push_sorted(target);
                    i += 1;
                    it.advance();
                }
                b.finish(space.clone())
            }
            BStmt::Seq(v) => {
                let mut acc: Option<Relation> = None;
                for s in v {
                    let r = self.stmt(s, space)?;
                    acc = Some(match acc {
                        None => r,
                        Some(a) => a.compose(&r)?,
                    });
                }
                acc.unwrap_or_else(|| Relation::identity_with(space.clone(), self.dense(space)))
            }
            BStmt::If { cond, then, els } => {
                // T∩[p] ∪ T̄∩[q], with q = skip when there is no else branch.
                let t = test_set(space, cond);
                let p = self.stmt(then, space)?;
                let q = match els {
                    Some(e) => self.stmt(e, space)?,
                    None => Relation::identity_with(space.clone(), self.dense(space)),
                };
                p.restrict_rows(&t)?.union(&q.restrict_rows(&t.complement())?)?
            }
            BStmt::While { cond, body } => {
                // (T∩[b])* restricted to final states in T̄.
                let t = test_set(space, cond);
                let b = self.stmt(body, space)?;
                b.restrict_rows(&t)?.rt_closure().restrict_cols(&t.complement())?
            }
            BStmt::Block { locals, body } => {
                let what = || {
                    let names: Vec<_> = locals.iter().map(|d| d.name.as_str()).collect();
                    format!("block declaring `{}` in program `{}`", names.join(", "), self.program)
                };
                let size = locals
                    .iter()
                    .fold(space.size(), |acc, d: &VarDecl| acc.saturating_mul(d.width()));
                if size > self.limits.max_states as u128 {
                    return Err(Error::CapExceeded {
                        what: what(),
                        size,
                        cap: self.limits.max_states,
                    });
                }
                let ext = space.extend(format!("{}+", space.name()), locals)?.shared();
                let inner = self.stmt(body, &ext)?;
                let m = (size / space.size()) as usize;
                inner.project_locals(space.clone(), m, self.limits)
            }
        })
    }
}
