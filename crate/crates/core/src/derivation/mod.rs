//! Derivation chains of increasingly correct programs, with per-step
//! competence domains and reliability.

mod manifest;
mod oracle;
mod prob;

use std::fmt::Write;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

pub use manifest::{parse_manifest, parse_state, Distribution, Manifest, Number};
pub use oracle::{
    default_fuel, independence_spot_check, oracle_competence_domain, reliability, DomainOracle, OracleCompetence,
    ReliabilityReport, Sensitivity, SpotCheck,
};
pub use prob::{parse_rational, render_decimal, Probability, ReliabilityModel};

use crate::correctness::{competence_domain, more_correct_det, more_correct_nondet};
use crate::error::{Error, Result};
use crate::proglang::{denote, BoundProgram};
use crate::region::Region;
use crate::relcore::{format_tuple, BitSet, Limits, Relation};
use crate::speclang::SpecFile;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Materialize the spec and denote every step.
    #[default]
    Exhaustive,
    /// Run the interpreter on each region state.
    Oracle,
}

#[derive(Clone, Debug)]
pub enum StepSource {
    Program(BoundProgram),
    Relation { name: String, rel: Relation },
}

#[derive(Clone, Debug)]
pub struct ChainStep {
    pub file: String,
    pub source: StepSource,
}

impl ChainStep {
    pub fn program(file: impl Into<String>, p: BoundProgram) -> Self {
        ChainStep {
            file: file.into(),
            source: StepSource::Program(p),
        }
    }

    pub fn name(&self) -> &str {
        match &self.source {
            StepSource::Program(p) => p.name(),
            StepSource::Relation { name, .. } => name,
        }
    }

    fn is_abort(&self) -> bool {
        match &self.source {
            StepSource::Program(p) => p.is_abort(),
            StepSource::Relation { rel, .. } => rel.is_empty(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DerivationChain {
    pub spec: SpecFile,
    pub steps: Vec<ChainStep>,
    pub mode: Mode,
    pub region: Region,
    /// Loop-iteration budget per run; defaults to each program's
    /// sufficient-fuel bound.
    pub fuel: Option<u64>,
    pub model: ReliabilityModel,
    pub threshold: Option<BigRational>,
    pub limits: Limits,
    /// Redraws of pinned variables in oracle mode; 0 disables the check.
    pub spot_checks: usize,
    /// Region states re-run per redraw.
    pub spot_sample: usize,
    pub seed: u64,
}

impl DerivationChain {
    pub fn new(spec: SpecFile, steps: Vec<ChainStep>, mode: Mode, region: Region) -> Self {
        DerivationChain {
            spec,
            steps,
            mode,
            region,
            fuel: None,
            model: ReliabilityModel::Uniform,
            threshold: None,
            limits: Limits::default(),
            spot_checks: 5,
            spot_sample: 64,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Termination {
    /// The last step is correct on the region.
    Correct,
    /// The last step's reliability meets the threshold.
    Threshold,
    Neither,
}

#[derive(Clone, Debug)]
pub struct StepReport {
    pub index: usize,
    pub name: String,
    /// Verdict against the previous step; `None` for the first.
    pub more_correct: Option<bool>,
    /// `|competence ∩ dom(R) ∩ region|`.
    pub competent: usize,
    pub reliability: Probability,
    pub correct_on_region: bool,
    pub witness: Option<String>,
    /// Region states on which the run provably diverges.
    pub diverging: usize,
}

#[derive(Clone, Debug)]
pub struct ChainReport {
    pub mode: Mode,
    pub region: String,
    pub domain_size: usize,
    pub steps: Vec<StepReport>,
    pub failed_at: Option<usize>,
    pub termination: Termination,
    pub warnings: Vec<String>,
    pub spot_check: Option<SpotCheck>,
    /// Set when fuel ran out below the sufficient bound; verification
    /// stops there.
    pub inconclusive: Option<String>,
}

impl ChainReport {
    pub fn verified(&self) -> bool {
        self.failed_at.is_none() && self.inconclusive.is_none() && self.spot_check.as_ref().is_none_or(|s| s.is_clean())
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let mode = match self.mode {
            Mode::Exhaustive => "exhaustive",
            Mode::Oracle => "oracle",
        };
        let _ = writeln!(out, "mode: {mode}");
        let _ = writeln!(out, "region: {}", self.region);
        let _ = writeln!(out, "dom(R) in region: {} states", self.domain_size);
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        if let Some(sc) = &self.spot_check {
            let _ = writeln!(
                out,
                "independence spot-check: {} redraws, {} runs, {} changes",
                sc.redraws,
                sc.runs,
                sc.changes.len()
            );
            for c in &sc.changes {
                let _ = writeln!(
                    out,
                    "  {}: {} {} but {} {}",
                    c.program,
                    format_tuple(&c.original),
                    if c.was_competent { "competent" } else { "not competent" },
                    format_tuple(&c.redrawn),
                    if c.was_competent { "not" } else { "is" }
                );
            }
        }
        if let Some(msg) = &self.inconclusive {
            let _ = writeln!(out, "inconclusive: {msg}");
        }
        if let Some(i) = self.failed_at {
            let s = &self.steps[i];
            let _ = writeln!(
                out,
                "step {i} ({}) is not more-correct than step {}: {}",
                s.name,
                i - 1,
                s.witness.as_deref().unwrap_or("")
            );
        }
        let _ = writeln!(out, "termination: {}", self.termination_name());
        let w = self.steps.iter().map(|s| s.name.len()).max().unwrap_or(0).max(7);
        let _ = writeln!(
            out,
            "{:<4} {:<w$} {:>12} {:>9} {:>7} {:>11}",
            "Step", "Program", "More-correct", "Competent", "Correct", "Reliability"
        );
        for s in &self.steps {
            let mc = match s.more_correct {
                None => "-",
                Some(true) => "yes",
                Some(false) => "NO",
            };
            let _ = writeln!(
                out,
                "{:<4} {:<w$} {:>12} {:>9} {:>7} {:>11}",
                s.index,
                s.name,
                mc,
                s.competent,
                if s.correct_on_region { "yes" } else { "no" },
                s.reliability.render(4)
            );
        }
        out
    }

    fn termination_name(&self) -> &'static str {
        match self.termination {
            Termination::Correct => "correct",
            Termination::Threshold => "threshold",
            Termination::Neither => "neither",
        }
    }

    pub fn record(&self) -> ChainRecord {
        ChainRecord {
            mode: self.mode,
            region: self.region.clone(),
            domain_size: self.domain_size,
            verified: self.verified(),
            failed_at: self.failed_at,
            termination: self.termination,
            inconclusive: self.inconclusive.clone(),
            warnings: self.warnings.clone(),
            spot_check: self.spot_check.as_ref().map(|s| SpotCheckRecord {
                redraws: s.redraws,
                runs: s.runs,
                changes: s
                    .changes
                    .iter()
                    .map(|c| {
                        format!(
                            "{}: {} -> {}",
                            c.program,
                            format_tuple(&c.original),
                            format_tuple(&c.redrawn)
                        )
                    })
                    .collect(),
            }),
            steps: self
                .steps
                .iter()
                .map(|s| StepRecord {
                    index: s.index,
                    program: s.name.clone(),
                    more_correct: s.more_correct,
                    competent: s.competent,
                    reliability: s.reliability.render(4),
                    reliability_exact: format!("{}/{}", s.reliability.num, s.reliability.den),
                    correct_on_region: s.correct_on_region,
                    diverging: s.diverging,
                    witness: s.witness.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainRecord {
    pub mode: Mode,
    pub region: String,
    pub domain_size: usize,
    pub verified: bool,
    pub failed_at: Option<usize>,
    pub termination: Termination,
    pub inconclusive: Option<String>,
    pub warnings: Vec<String>,
    pub spot_check: Option<SpotCheckRecord>,
    pub steps: Vec<StepRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpotCheckRecord {
    pub redraws: usize,
    pub runs: usize,
    pub changes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub index: usize,
    pub program: String,
    pub more_correct: Option<bool>,
    pub competent: usize,
    pub reliability: String,
    pub reliability_exact: String,
    pub correct_on_region: bool,
    pub diverging: usize,
    pub witness: Option<String>,
}

/// Per-step competence over the region, as region positions.
struct Competence {
    bits: BitSet,
    diverging: usize,
    /// Relation-level verdict against the previous step (exhaustive mode).
    judged: Option<(bool, Option<String>)>,
}

fn weigh(model: &ReliabilityModel, region: &Region, bits: &BitSet) -> u128 {
    bits.iter().map(|k| model.weight(&region.state_at(k)) as u128).sum()
}

/// Verifies each adjacent pair of steps for relative correctness and
/// reports competence and reliability per step. Stops at the first failing
/// step.
pub fn verify_chain(chain: &DerivationChain) -> Result<ChainReport> {
    if chain.region.space() != &chain.spec.space {
        return Err(Error::SpaceMismatch {
            left: chain.region.space().name().to_string(),
            right: chain.spec.space.name().to_string(),
        });
    }
    let mut warnings = Vec::new();
    match chain.steps.first() {
        None => return Err(Error::Manifest("the chain has no steps".into())),
        Some(s) if !s.is_abort() => warnings.push(format!("step 0 ({}) is not `abort`", s.name())),
        _ => {}
    }
    for s in &chain.steps {
        if let StepSource::Program(p) = &s.source {
            warnings.extend(p.warnings().iter().map(|w| format!("{}:{w}", s.file)));
        }
    }
    let mut report = ChainReport {
        mode: chain.mode,
        region: chain.region.to_string(),
        domain_size: 0,
        steps: Vec::new(),
        failed_at: None,
        termination: Termination::Neither,
        warnings,
        spot_check: None,
        inconclusive: None,
    };
    match chain.mode {
        Mode::Exhaustive => exhaustive(chain, &mut report)?,
        Mode::Oracle => oracle(chain, &mut report)?,
    }
    if report.failed_at.is_none() && report.inconclusive.is_none() {
        if let Some(last) = report.steps.last() {
            report.termination = if last.correct_on_region {
                Termination::Correct
            } else if chain.threshold.as_ref().is_some_and(|t| last.reliability.value() >= *t) {
                Termination::Threshold
            } else {
                Termination::Neither
            };
        }
    }
    Ok(report)
}

fn push_step(
    chain: &DerivationChain,
    report: &mut ChainReport,
    domain: &BitSet,
    prev: Option<&BitSet>,
    step: &ChainStep,
    c: &Competence,
) -> Result<bool> {
    let index = report.steps.len();
    let (more_correct, witness) = match (&c.judged, prev) {
        (Some((v, w)), _) => (Some(*v), w.clone()),
        (None, None) => (None, None),
        (None, Some(p)) => {
            let lost = p.iter().find(|&k| !c.bits.contains(k));
            (
                Some(lost.is_none()),
                lost.map(|k| {
                    format!(
                        "{}: competent for step {} but not for step {index}",
                        format_tuple(&chain.region.state_at(k)),
                        index - 1
                    )
                }),
            )
        }
    };
    let reliability = Probability::new(
        weigh(&chain.model, &chain.region, &c.bits),
        weigh(&chain.model, &chain.region, domain),
    )?;
    report.steps.push(StepReport {
        index,
        name: step.name().to_string(),
        more_correct,
        competent: c.bits.count(),
        reliability,
        correct_on_region: domain.is_subset(&c.bits),
        witness,
        diverging: c.diverging,
    });
    if more_correct == Some(false) {
        report.failed_at = Some(index);
        return Ok(false);
    }
    Ok(true)
}

fn exhaustive(chain: &DerivationChain, report: &mut ChainReport) -> Result<()> {
    let r = chain.spec.materialize(&chain.limits)?;
    let space = &chain.spec.space;
    let positions: Vec<usize> = chain.region.iter().map(|s| space.index_of(&s)).collect::<Result<_>>()?;
    let dom_r = r.domain();
    let mut domain = BitSet::new(chain.region.len());
    for (k, &i) in positions.iter().enumerate() {
        if dom_r.contains(i) {
            domain.insert(k);
        }
    }
    report.domain_size = domain.count();
    let mut prev: Option<(Relation, BitSet)> = None;
    for step in &chain.steps {
        let rel = match &step.source {
            StepSource::Program(p) => denote(p, &chain.limits)?,
            StepSource::Relation { rel, .. } => rel.clone(),
        };
        let comp = competence_domain(&rel, &r)?;
        let mut bits = BitSet::new(chain.region.len());
        for (k, &i) in positions.iter().enumerate() {
            if comp.contains(i) {
                bits.insert(k);
            }
        }
        let judged = match &prev {
            None => None,
            Some((p, _)) => {
                let j = if p.is_deterministic() && rel.is_deterministic() {
                    more_correct_det(&rel, p, &r)?
                } else {
                    more_correct_nondet(&rel, p, &r)?
                };
                let w = j.record().witness.map(|w| format!("{}: {}", w.evidence, w.reason));
                Some((j.verdict, w))
            }
        };
        let c = Competence {
            bits,
            diverging: 0,
            judged,
        };
        let ok = push_step(chain, report, &domain, prev.as_ref().map(|p| &p.1), step, &c)?;
        if !ok {
            return Ok(());
        }
        prev = Some((rel, c.bits));
    }
    Ok(())
}

fn oracle(chain: &DerivationChain, report: &mut ChainReport) -> Result<()> {
    let domain = DomainOracle::new(&chain.spec).within(&chain.region);
    report.domain_size = domain.count();
    let mut spot = SpotCheck {
        redraws: chain.spot_checks,
        ..SpotCheck::default()
    };
    let mut prev: Option<BitSet> = None;
    for step in &chain.steps {
        let StepSource::Program(p) = &step.source else {
            return Err(Error::Manifest(format!(
                "step `{}` is a relation literal; oracle mode needs programs",
                step.file
            )));
        };
        let fuel = chain.fuel.unwrap_or_else(|| default_fuel(p));
        let oc = oracle::competence_with_domain(p, &chain.spec, &chain.region, domain.clone(), fuel)?;
        if let Some(s) = oc.inconclusive.first() {
            report.inconclusive = Some(format!(
                "fuel {fuel} ran out for `{}` at {} before the sufficient bound {}",
                p.name(),
                format_tuple(s),
                p.sufficient_fuel()
            ));
            return Ok(());
        }
        if chain.spot_checks > 0 {
            let sc = independence_spot_check(
                &oc,
                p,
                &chain.spec,
                fuel,
                chain.spot_checks,
                chain.spot_sample,
                chain.seed,
            )?;
            spot.runs += sc.runs;
            spot.changes.extend(sc.changes);
        }
        let c = Competence {
            bits: oc.competent,
            diverging: oc.diverging.len(),
            judged: None,
        };
        let ok = push_step(chain, report, &domain, prev.as_ref(), step, &c)?;
        if chain.spot_checks > 0 {
            report.spot_check = Some(spot.clone());
        }
        if !ok {
            return Ok(());
        }
        prev = Some(c.bits);
    }
    Ok(())
}

#[cfg(test)]
mod tests;
