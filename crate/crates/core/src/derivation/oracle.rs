//! Pointwise evaluation over an initial region, for spaces too large to
//! materialize.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::prob::{Probability, ReliabilityModel};
use crate::error::{Error, Result};
use crate::proglang::{BoundProgram, NoOutcome, Runner};
use crate::region::Region;
use crate::relcore::{format_tuple, BitSet};
use crate::speclang::{find_witness, SpecFile, WitnessBounds};

/// Decides `s ∈ dom(R)`: by the domain clause when the spec has one,
/// otherwise by witness search over the declared ranges, which is exact.
pub struct DomainOracle<'a> {
    spec: &'a SpecFile,
    bounds: WitnessBounds,
}

impl<'a> DomainOracle<'a> {
    pub fn new(spec: &'a SpecFile) -> Self {
        DomainOracle {
            spec,
            bounds: WitnessBounds::declared(&spec.space),
        }
    }

    pub fn contains(&self, s: &[i64]) -> bool {
        match self.spec.domain_clause(s) {
            Some(b) => b,
            None => find_witness(&self.spec.spec, s, &self.bounds).is_some(),
        }
    }

    /// `dom(R) ∩ region`, as region positions.
    pub fn within(&self, region: &Region) -> BitSet {
        let mut bits = BitSet::new(region.len());
        for (k, s) in region.iter().enumerate() {
            if self.contains(&s) {
                bits.insert(k);
            }
        }
        bits
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Membership {
    In,
    Out,
    /// Fuel ran out at or above the program's sufficient-fuel bound.
    Diverges,
    /// Fuel ran out below that bound.
    Unknown,
}

fn membership(runner: &mut Runner, spec: &SpecFile, s: &[i64], fuel: u64, sufficient: bool) -> Membership {
    match runner.run(s, fuel) {
        Ok(f) if spec.spec.holds(s, f) => Membership::In,
        Ok(_) => Membership::Out,
        Err(NoOutcome::FuelExhausted) if sufficient => Membership::Diverges,
        Err(NoOutcome::FuelExhausted) => Membership::Unknown,
        Err(_) => Membership::Out,
    }
}

/// Fuel to use when none is given: the sufficient-fuel bound, clamped.
pub fn default_fuel(p: &BoundProgram) -> u64 {
    p.sufficient_fuel().min(u64::MAX as u128) as u64
}

/// Competence domain of a program on a region, computed by running it.
#[derive(Clone, Debug)]
pub struct OracleCompetence {
    pub program: String,
    pub region: Region,
    /// `dom(R) ∩ region`.
    pub domain: BitSet,
    pub competent: BitSet,
    pub diverging: Vec<Vec<i64>>,
    /// States where fuel ran out below the sufficient-fuel bound; any entry
    /// makes the result inconclusive.
    pub inconclusive: Vec<Vec<i64>>,
}

impl OracleCompetence {
    pub fn is_conclusive(&self) -> bool {
        self.inconclusive.is_empty()
    }

    pub fn domain_len(&self) -> usize {
        self.domain.count()
    }

    pub fn competent_len(&self) -> usize {
        self.competent.count()
    }

    /// All of `dom(R) ∩ region` is covered.
    pub fn correct_on_region(&self) -> bool {
        self.domain.is_subset(&self.competent)
    }

    pub fn states(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        self.competent.iter().map(|k| self.region.state_at(k))
    }

    /// Least region state competent in `self` but not in `other`.
    pub fn first_lost(&self, other: &OracleCompetence) -> Option<Vec<i64>> {
        self.competent
            .iter()
            .find(|&k| !other.competent.contains(k))
            .map(|k| self.region.state_at(k))
    }

    pub fn reliability(&self, model: &ReliabilityModel) -> Result<Probability> {
        if !self.is_conclusive() {
            return Err(Error::Inconclusive(format!(
                "fuel ran out below the sufficient bound for `{}` at {}",
                self.program,
                format_tuple(&self.inconclusive[0])
            )));
        }
        let weigh = |bits: &BitSet| -> u128 {
            bits.iter()
                .map(|k| model.weight(&self.region.state_at(k)) as u128)
                .sum()
        };
        let (num, den) = (weigh(&self.competent), weigh(&self.domain));
        Probability::new(num, den)
    }
}

fn check_region(p: &BoundProgram, spec: &SpecFile, region: &Region) -> Result<()> {
    for (what, space) in [("program", p.space()), ("region", region.space())] {
        if space != &spec.space {
            return Err(Error::SpaceMismatch {
                left: format!("{what} space `{}`", space.name()),
                right: spec.space.name().to_string(),
            });
        }
    }
    Ok(())
}

/// `{s ∈ region | p terminates from s in some s' with holds(spec, s, s')}`.
///
/// States outside `dom(R)` are not run: no final state can satisfy the spec
/// there, and programs may diverge on them.
pub fn oracle_competence_domain(
    p: &BoundProgram,
    spec: &SpecFile,
    region: &Region,
    fuel: u64,
) -> Result<OracleCompetence> {
    let domain = DomainOracle::new(spec).within(region);
    competence_with_domain(p, spec, region, domain, fuel)
}

pub(crate) fn competence_with_domain(
    p: &BoundProgram,
    spec: &SpecFile,
    region: &Region,
    domain: BitSet,
    fuel: u64,
) -> Result<OracleCompetence> {
    check_region(p, spec, region)?;
    let sufficient = fuel as u128 >= p.sufficient_fuel();
    let mut runner = Runner::new(p);
    let mut out = OracleCompetence {
        program: p.name().to_string(),
        region: region.clone(),
        competent: BitSet::new(region.len()),
        domain,
        diverging: Vec::new(),
        inconclusive: Vec::new(),
    };
    for k in out.domain.iter().collect::<Vec<_>>() {
        let s = region.state_at(k);
        match membership(&mut runner, spec, &s, fuel, sufficient) {
            Membership::In => {
                out.competent.insert(k);
            }
            Membership::Out => {}
            Membership::Diverges => out.diverging.push(s),
            Membership::Unknown => out.inconclusive.push(s),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct ReliabilityReport {
    pub program: String,
    pub competent: usize,
    pub domain: usize,
    pub probability: Probability,
}

/// Probability that a state of `dom(R) ∩ region`, drawn from `model`, lies
/// in the competence domain.
pub fn reliability(
    p: &BoundProgram,
    spec: &SpecFile,
    model: &ReliabilityModel,
    region: &Region,
    fuel: u64,
) -> Result<ReliabilityReport> {
    let c = oracle_competence_domain(p, spec, region, fuel)?;
    Ok(ReliabilityReport {
        program: c.program.clone(),
        competent: c.competent_len(),
        domain: c.domain_len(),
        probability: c.reliability(model)?,
    })
}

/// A competence verdict that changed when pinned variables were redrawn.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sensitivity {
    pub program: String,
    pub original: Vec<i64>,
    pub redrawn: Vec<i64>,
    pub was_competent: bool,
}

#[derive(Clone, Debug, Default)]
pub struct SpotCheck {
    pub redraws: usize,
    pub runs: usize,
    pub changes: Vec<Sensitivity>,
}

impl SpotCheck {
    pub fn is_clean(&self) -> bool {
        self.changes.is_empty()
    }
}

/// Re-runs a random sample of region states with the pinned variables set
/// to random values in their ranges, and records any state whose
/// competence changes.
pub fn independence_spot_check(
    c: &OracleCompetence,
    p: &BoundProgram,
    spec: &SpecFile,
    fuel: u64,
    redraws: usize,
    sample: usize,
    seed: u64,
) -> Result<SpotCheck> {
    check_region(p, spec, &c.region)?;
    let mut out = SpotCheck {
        redraws,
        ..SpotCheck::default()
    };
    let pinned = c.region.pinned();
    if pinned.is_empty() || c.region.is_empty() {
        return Ok(out);
    }
    let dom = DomainOracle::new(spec);
    let sufficient = fuel as u128 >= p.sufficient_fuel();
    let mut runner = Runner::new(p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars = spec.space.vars();
    for _ in 0..redraws {
        let values: Vec<i64> = vars.iter().map(|d| rng.gen_range(d.lo..=d.hi)).collect();
        for _ in 0..sample {
            let k = rng.gen_range(0..c.region.len());
            let original = c.region.state_at(k);
            let mut redrawn = original.clone();
            for &i in &pinned {
                redrawn[i] = values[i];
            }
            let now = dom.contains(&redrawn) && {
                out.runs += 1;
                match membership(&mut runner, spec, &redrawn, fuel, sufficient) {
                    Membership::In => true,
                    Membership::Out | Membership::Diverges => false,
                    Membership::Unknown => {
                        return Err(Error::Inconclusive(format!(
                            "fuel ran out below the sufficient bound for `{}` at {}",
                            p.name(),
                            format_tuple(&redrawn)
                        )))
                    }
                }
            };
            let before = c.competent.contains(k);
            if now != before {
                out.changes.push(Sensitivity {
                    program: p.name().to_string(),
                    original,
                    redrawn,
                    was_competent: before,
                });
            }
        }
    }
    Ok(out)
}
