//! The imperative mini-language: parsing, binding, relational denotation,
//! and a fuel-bounded interpreter.

mod ast;
mod bind;
mod denote;
mod exec;

use std::fmt;

pub use ast::{parse_program, parse_program_with, ParseOptions, Program, Stmt};
pub use bind::BoundProgram;
pub use denote::denote;

use crate::error::{Error, Result};
use crate::relcore::{format_tuple, Limits};
use exec::{Exit, Machine};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NoOutcome {
    Aborted,
    ExpressionUndefined,
    FuelExhausted,
}

impl fmt::Display for NoOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoOutcome::Aborted => "aborted",
            NoOutcome::ExpressionUndefined => "expression-undefined",
            NoOutcome::FuelExhausted => "fuel-exhausted",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Final(Vec<i64>),
    NoOutcome(NoOutcome),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Final(s) => write!(f, "final {}", format_tuple(s)),
            Outcome::NoOutcome(r) => write!(f, "no outcome ({r})"),
        }
    }
}

/// Runs `p` from `state`, allowing at most `fuel` loop iterations in total.
pub fn interpret(p: &BoundProgram, state: &[i64], fuel: u64) -> Result<Outcome> {
    if !p.space().contains(state) {
        return Err(Error::StateOutOfSpace {
            state: format_tuple(state),
            space: p.space().name().to_string(),
        });
    }
    let mut m = Machine::new(&p.code);
    Ok(match m.run(state, fuel) {
        Exit::Halt => Outcome::Final(m.state().to_vec()),
        Exit::Aborted => Outcome::NoOutcome(NoOutcome::Aborted),
        Exit::Undefined => Outcome::NoOutcome(NoOutcome::ExpressionUndefined),
        Exit::Fuel => Outcome::NoOutcome(NoOutcome::FuelExhausted),
    })
}

/// Interpreter handle for running one program on many states.
pub struct Runner<'a> {
    machine: Machine<'a>,
}

impl<'a> Runner<'a> {
    pub fn new(p: &'a BoundProgram) -> Self {
        Runner {
            machine: Machine::new(&p.code),
        }
    }

    /// Like [`interpret`] without the membership check or allocation; the
    /// final state, if any, is borrowed from the runner.
    pub fn run(&mut self, state: &[i64], fuel: u64) -> std::result::Result<&[i64], NoOutcome> {
        match self.machine.run(state, fuel) {
            Exit::Halt => Ok(self.machine.state()),
            Exit::Aborted => Err(NoOutcome::Aborted),
            Exit::Undefined => Err(NoOutcome::ExpressionUndefined),
            Exit::Fuel => Err(NoOutcome::FuelExhausted),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub state: Vec<i64>,
    pub outcome: Outcome,
    /// Images of `state` under the denotation.
    pub denoted: Vec<Vec<i64>>,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let imgs: Vec<_> = self.denoted.iter().map(|s| format_tuple(s)).collect();
        write!(
            f,
            "{}: interpreter gives {}, denotation gives {{{}}}",
            format_tuple(&self.state),
            self.outcome,
            imgs.join(", ")
        )
    }
}

#[derive(Clone, Debug)]
pub struct AgreementReport {
    pub program: String,
    pub states: usize,
    pub fuel: u64,
    pub sufficient_fuel: u128,
    pub mismatches: Vec<Mismatch>,
    /// Fuel ran out below the sufficient-fuel bound.
    pub inconclusive: Vec<Vec<i64>>,
    /// Fuel ran out at or above the bound: the run diverges.
    pub diverging: Vec<Vec<i64>>,
}

impl AgreementReport {
    pub fn agrees(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares the interpreter with the denotation on every state of the
/// program's space.
pub fn agreement_check(p: &BoundProgram, fuel: u64, limits: &Limits) -> Result<AgreementReport> {
    let rel = denote(p, limits)?;
    let space = p.space();
    let mut report = AgreementReport {
        program: p.name().to_string(),
        states: rel.order(),
        fuel,
        sufficient_fuel: p.sufficient_fuel(),
        mismatches: Vec::new(),
        inconclusive: Vec::new(),
        diverging: Vec::new(),
    };
    let sufficient = fuel as u128 >= report.sufficient_fuel;
    let mut runner = Runner::new(p);
    for (i, s) in space.states().enumerate() {
        let image = rel.image(i);
        let outcome = match runner.run(&s, fuel) {
            Ok(f) => Outcome::Final(f.to_vec()),
            Err(r) => Outcome::NoOutcome(r),
        };
        let ok = match &outcome {
            Outcome::Final(f) => image.len() == 1 && image[0] == space.index_of(f)?,
            Outcome::NoOutcome(NoOutcome::FuelExhausted) if !sufficient => {
                report.inconclusive.push(s);
                continue;
            }
            Outcome::NoOutcome(NoOutcome::FuelExhausted) => {
                report.diverging.push(s.clone());
                image.is_empty()
            }
            Outcome::NoOutcome(_) => image.is_empty(),
        };
        if !ok {
            report.mismatches.push(Mismatch {
                state: s,
                outcome,
                denoted: image.iter().map(|&j| space.state_at(j)).collect(),
            });
        }
    }
    Ok(report)
}
