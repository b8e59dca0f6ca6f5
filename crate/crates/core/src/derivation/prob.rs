use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact probability with its raw weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Probability {
    pub num: BigInt,
    pub den: BigInt,
}

impl Probability {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let (num, den) = (num.into(), den.into());
        if den.is_zero() {
            return Err(Error::ZeroWeight);
        }
        Ok(Probability { num, den })
    }

    pub fn value(&self) -> BigRational {
        BigRational::new(self.num.clone(), self.den.clone())
    }

    pub fn to_f64(&self) -> f64 {
        self.value().to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal rendering rounded half up, e.g. `0.0133` for 100/7500.
    pub fn render(&self, places: usize) -> String {
        render_decimal(&self.value(), places)
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(4))
    }
}

pub fn render_decimal(q: &BigRational, places: usize) -> String {
    let neg = q.is_negative();
    let scale = BigInt::from(10u32).pow(places as u32);
    let scaled = q.abs() * BigRational::from_integer(scale.clone());
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let rounded = (scaled + half).floor().to_integer();
    let int_part = &rounded / &scale;
    let frac = (&rounded % &scale).to_string();
    let sign = if neg && !rounded.is_zero() { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{int_part}");
    }
    format!("{sign}{int_part}.{}{frac}", "0".repeat(places - frac.len()))
}

/// Parses `0.95`, `19/20` or `1` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::Manifest(format!("`{text}` is not a number"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    if frac.chars().any(|c| !c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    Ok(BigRational::new(digits, BigInt::from(10u32).pow(frac.len() as u32)))
}

/// Distribution over initial states, restricted to `dom(R)` when used.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum ReliabilityModel {
    #[default]
    Uniform,
    /// Explicit non-negative weights; states not listed get `default`.
    Weights {
        weights: HashMap<Vec<i64>, u64>,
        default: u64,
    },
}

impl ReliabilityModel {
    pub fn weight(&self, state: &[i64]) -> u64 {
        match self {
            ReliabilityModel::Uniform => 1,
            ReliabilityModel::Weights { weights, default } => weights.get(state).copied().unwrap_or(*default),
        }
    }
}
