use std::sync::Arc;

use super::ast::{Program, Stmt};
use super::exec::{self, Code};
use crate::error::{Error, Pos, Result};
use crate::relcore::{StateSpace, VarDecl};
use crate::syntax::expr::{BoolExpr, IntExpr, Slot, Var};

/// Statement with variables resolved to slots of the enclosing scope.
/// A scope is the program space followed by the locals of every enclosing
/// block, innermost last.
#[derive(Clone, Debug)]
pub(crate) enum BStmt {
    Abort,
    Skip,
    Assign {
        slot: usize,
        expr: IntExpr<Slot>,
        lo: i64,
        hi: i64,
    },
    Seq(Vec<BStmt>),
    If {
        cond: BoolExpr<Slot>,
        then: Box<BStmt>,
        els: Option<Box<BStmt>>,
    },
    While {
        cond: BoolExpr<Slot>,
        body: Box<BStmt>,
    },
    Block {
        locals: Vec<VarDecl>,
        body: Box<BStmt>,
    },
}

/// A program bound to a state space, ready for denotation and execution.
#[derive(Clone, Debug)]
pub struct BoundProgram {
    name: String,
    space: Arc<StateSpace>,
    pub(crate) body: BStmt,
    warnings: Vec<String>,
    loops: usize,
    max_extended: u128,
    pub(crate) code: Arc<Code>,
}

impl BoundProgram {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    /// Static warnings, such as locals that may be read before assignment.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// True for the program `abort` (possibly inside a sequence or block).
    pub fn is_abort(&self) -> bool {
        fn abort(s: &BStmt) -> bool {
            match s {
                BStmt::Abort => true,
                BStmt::Seq(v) => v.len() == 1 && abort(&v[0]),
                BStmt::Block { body, .. } => abort(body),
                _ => false,
            }
        }
        abort(&self.body)
    }

    pub fn loop_count(&self) -> usize {
        self.loops
    }

    /// Size of the largest space the program works in (space plus the
    /// locals of the deepest block).
    pub fn max_extended_size(&self) -> u128 {
        self.max_extended
    }

    /// Fuel (total loop iterations) past which a run provably diverges: a
    /// terminating run never revisits a loop head in the same extended
    /// state.
    pub fn sufficient_fuel(&self) -> u128 {
        (self.loops as u128).saturating_mul(self.max_extended).saturating_add(1)
    }
}

impl Program {
    /// Resolves names against `space`. Fails on undeclared variables,
    /// shadowing, primed variables and spec-only built-ins.
    pub fn bind(&self, space: &Arc<StateSpace>) -> Result<BoundProgram> {
        if let Some(over) = &self.over {
            if over != space.name() {
                return Err(Error::SpaceMismatch {
                    left: format!("{over} (program `{}`)", self.name),
                    right: space.name().to_string(),
                });
            }
        }
        let mut b = Binder {
            scope: space.vars().to_vec(),
            assigned: vec![true; space.arity()],
            warnings: Vec::new(),
            max_extended: space.size(),
            max_slots: space.arity(),
        };
        let body = b.stmt(&self.body)?;
        let code = exec::compile(&body, space.arity(), b.max_slots);
        Ok(BoundProgram {
            name: self.name.clone(),
            space: space.clone(),
            body,
            warnings: b.warnings,
            loops: self.body.count_loops(),
            max_extended: b.max_extended,
            code: Arc::new(code),
        })
    }
}

struct Binder {
    scope: Vec<VarDecl>,
    assigned: Vec<bool>,
    warnings: Vec<String>,
    max_extended: u128,
    max_slots: usize,
}

fn reject_builtins(uses: bool, pos: Pos) -> Result<()> {
    if uses {
        return Err(Error::Semantic {
            pos,
            msg: "perfect_square and ceil_sqrt are only available in specifications".into(),
        });
    }
    Ok(())
}

impl Binder {
    fn resolve(&mut self, v: &Var) -> Result<Slot> {
        if v.primed {
            return Err(Error::Semantic {
                pos: v.pos,
                msg: format!("primed variable `{v}` cannot appear in a program"),
            });
        }
        let index = self
            .scope
            .iter()
            .rposition(|d| d.name == v.name)
            .ok_or_else(|| Error::UnknownVariable {
                pos: v.pos,
                name: v.name.clone(),
            })?;
        Ok(Slot { index, primed: false })
    }

    fn read(&mut self, v: &Var) -> Result<Slot> {
        let s = self.resolve(v)?;
        if !self.assigned[s.index] {
            let msg = format!("{}: local `{}` may be read before it is assigned", v.pos, v.name);
            if !self.warnings.contains(&msg) {
                self.warnings.push(msg);
            }
        }
        Ok(s)
    }

    fn int(&mut self, e: &IntExpr, pos: Pos) -> Result<IntExpr<Slot>> {
        reject_builtins(e.uses_builtins(), pos)?;
        e.try_map_vars(&mut |v| self.read(v))
    }

    fn cond(&mut self, e: &BoolExpr, pos: Pos) -> Result<BoolExpr<Slot>> {
        reject_builtins(e.uses_builtins(), pos)?;
        e.try_map_vars(&mut |v| self.read(v))
    }

    fn stmt(&mut self, s: &Stmt) -> Result<BStmt> {
        Ok(match s {
            Stmt::Abort(_) => {
                // Nothing after abort executes.
                self.assigned.iter_mut().for_each(|a| *a = true);
                BStmt::Abort
            }
            Stmt::Skip(_) => BStmt::Skip,
            Stmt::Assign { target, expr, pos } => {
                let expr = self.int(expr, *pos)?;
                let slot = self.resolve(target)?.index;
                self.assigned[slot] = true;
                let d = &self.scope[slot];
                BStmt::Assign {
                    slot,
                    expr,
                    lo: d.lo,
                    hi: d.hi,
                }
            }
            Stmt::Seq(v) => BStmt::Seq(v.iter().map(|s| self.stmt(s)).collect::<Result<_>>()?),
            Stmt::If { cond, then, pos } => {
                let cond = self.cond(cond, *pos)?;
                let before = self.assigned.clone();
                let then = Box::new(self.stmt(then)?);
                self.meet(&before);
                BStmt::If { cond, then, els: None }
            }
            Stmt::IfElse { cond, then, els, pos } => {
                let cond = self.cond(cond, *pos)?;
                let before = self.assigned.clone();
                let then = Box::new(self.stmt(then)?);
                let after_then = std::mem::replace(&mut self.assigned, before);
                let els = Box::new(self.stmt(els)?);
                self.meet(&after_then);
                BStmt::If {
                    cond,
                    then,
                    els: Some(els),
                }
            }
            Stmt::While { cond, body, pos } => {
                let cond = self.cond(cond, *pos)?;
                let before = self.assigned.clone();
                let body = Box::new(self.stmt(body)?);
                self.assigned = before;
                BStmt::While { cond, body }
            }
            Stmt::Block { locals, body, .. } => {
                for (i, (d, p)) in locals.iter().enumerate() {
                    if self.scope.iter().any(|v| v.name == d.name) || locals[..i].iter().any(|(o, _)| o.name == d.name)
                    {
                        return Err(Error::Shadowing {
                            pos: *p,
                            name: d.name.clone(),
                        });
                    }
                }
                let depth = self.scope.len();
                self.scope.extend(locals.iter().map(|(d, _)| d.clone()));
                self.assigned.resize(self.scope.len(), false);
                self.max_slots = self.max_slots.max(self.scope.len());
                let size = self.scope.iter().fold(1u128, |acc, d| acc.saturating_mul(d.width()));
                self.max_extended = self.max_extended.max(size);
                let body = self.stmt(body)?;
                self.scope.truncate(depth);
                self.assigned.truncate(depth);
                BStmt::Block {
                    locals: locals.iter().map(|(d, _)| d.clone()).collect(),
                    body: Box::new(body),
                }
            }
        })
    }

    fn meet(&mut self, other: &[bool]) {
        for (a, b) in self.assigned.iter_mut().zip(other) {
            *a &= *b;
        }
    }
}
