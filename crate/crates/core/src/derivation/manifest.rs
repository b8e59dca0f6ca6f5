//! Chain manifests (`.chain`, TOML).
//!
//! ```toml
//! spec = "fermat.spec"
//! steps = ["p0.prog", "p1.prog", "p2.prog", "p3.prog"]
//! mode = "oracle"
//! region = "n=1..10000, x=0, y=0"
//! threshold = 0.99
//!
//! [distribution]
//! kind = "weights"
//! default = 1
//! weights = { "(9,0,0)" = 4 }
//! ```
//!
//! Paths are resolved by the caller, normally against the manifest's
//! directory.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use serde::Deserialize;

use super::prob::{parse_rational, ReliabilityModel};
use super::{ChainStep, DerivationChain, Mode, StepSource};
use crate::error::{Error, Result};
use crate::proglang::parse_program;
use crate::region::Region;
use crate::relcore::{parse_relation, Limits, StateSpace};
use crate::speclang::parse_spec;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub spec: String,
    pub steps: Vec<String>,
    #[serde(default)]
    pub mode: Mode,
    pub region: Option<String>,
    pub fuel: Option<u64>,
    pub threshold: Option<Number>,
    pub max_states: Option<usize>,
    pub distribution: Option<Distribution>,
    pub spot_checks: Option<usize>,
    pub spot_sample: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    fn to_rational(&self) -> Result<BigRational> {
        match self {
            Number::Int(i) => Ok(BigRational::from_integer((*i).into())),
            // The shortest round-trip rendering of a float is the decimal
            // the user wrote.
            Number::Float(f) => parse_rational(&f.to_string()),
            Number::Text(t) => parse_rational(t),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Distribution {
    Uniform,
    Weights {
        #[serde(default)]
        default: u64,
        weights: BTreeMap<String, u64>,
    },
}

pub fn parse_manifest(text: &str) -> Result<Manifest> {
    toml::from_str(text).map_err(|e| Error::Manifest(e.message().to_string()))
}

/// Parses a state tuple such as `(4,0,0)`; the parentheses are optional.
pub fn parse_state(text: &str, space: &StateSpace) -> Result<Vec<i64>> {
    let t = text.trim();
    let inner = t.strip_prefix('(').and_then(|t| t.strip_suffix(')')).or(Some(t));
    let bad = || Error::Manifest(format!("`{text}` is not a state tuple like (1,0,0)"));
    let vals = inner
        .ok_or_else(bad)?
        .split(',')
        .map(|v| v.trim().parse::<i64>().map_err(|_| bad()))
        .collect::<Result<Vec<_>>>()?;
    if !space.contains(&vals) {
        return Err(Error::StateOutOfSpace {
            state: text.trim().to_string(),
            space: space.name().to_string(),
        });
    }
    Ok(vals)
}

impl DerivationChain {
    /// Builds a chain from manifest text; `load` returns the contents of a
    /// file named in the manifest.
    pub fn from_manifest(text: &str, load: &mut dyn FnMut(&str) -> Result<String>) -> Result<DerivationChain> {
        let m = parse_manifest(text)?;
        let spec_src = load(&m.spec)?;
        let spec = parse_spec(&spec_src).map_err(|e| e.in_file(&m.spec))?;
        let space = spec.space.clone();
        let mut steps = Vec::new();
        for file in &m.steps {
            let src = load(file)?;
            let source = if file.ends_with(".rel") {
                let rel = parse_relation(&src, Some(&space)).map_err(|e| e.in_file(file))?;
                let stem = file.rsplit(['/', '\\']).next().unwrap_or(file);
                StepSource::Relation {
                    name: stem.trim_end_matches(".rel").to_string(),
                    rel,
                }
            } else {
                let p = parse_program(&src)
                    .and_then(|p| p.bind(&space))
                    .map_err(|e| e.in_file(file))?;
                StepSource::Program(p)
            };
            steps.push(ChainStep {
                file: file.clone(),
                source,
            });
        }
        let region = match (&m.region, m.mode) {
            (Some(r), _) => Region::parse(space.clone(), r)?,
            (None, Mode::Exhaustive) => Region::full(space.clone()),
            (None, Mode::Oracle) => return Err(Error::Manifest("oracle mode needs a `region`".into())),
        };
        let model = match &m.distribution {
            None | Some(Distribution::Uniform) => ReliabilityModel::Uniform,
            Some(Distribution::Weights { default, weights }) => ReliabilityModel::Weights {
                weights: weights
                    .iter()
                    .map(|(k, w)| Ok((parse_state(k, &space)?, *w)))
                    .collect::<Result<HashMap<_, _>>>()?,
                default: *default,
            },
        };
        let threshold = m.threshold.as_ref().map(Number::to_rational).transpose()?;
        let mut chain = DerivationChain::new(spec, steps, m.mode, region);
        chain.fuel = m.fuel;
        chain.model = model;
        chain.threshold = threshold;
        if let Some(cap) = m.max_states {
            chain.limits = Limits::with_max_states(cap);
        }
        if let Some(k) = m.spot_checks {
            chain.spot_checks = k;
        }
        if let Some(k) = m.spot_sample {
            chain.spot_sample = k;
        }
        if let Some(s) = m.seed {
            chain.seed = s;
        }
        Ok(chain)
    }
}
