use std::collections::HashMap;

use super::*;
use crate::proglang::parse_program;
use crate::speclang::parse_spec;

macro_rules! corpus {
    ($scale:literal, $file:literal) => {
        include_str!(concat!("../../../../corpus/fermat/", $scale, "/", $file))
    };
}

fn full_spec() -> SpecFile {
    parse_spec(corpus!("full", "fermat.spec")).unwrap()
}

fn step(spec: &SpecFile, file: &str, src: &str) -> ChainStep {
    ChainStep::program(file, parse_program(src).unwrap().bind(&spec.space).unwrap())
}

fn full_steps(spec: &SpecFile) -> Vec<ChainStep> {
    vec![
        step(spec, "p0.prog", corpus!("full", "p0.prog")),
        step(spec, "p1.prog", corpus!("full", "p1.prog")),
        step(spec, "p2.prog", corpus!("full", "p2.prog")),
        step(spec, "p3.prog", corpus!("full", "p3.prog")),
    ]
}

/// n ≡ 2 (mod 4) is the only obstruction to a difference of two squares.
fn expected_domain(lo: i64, hi: i64) -> usize {
    (lo..=hi).filter(|n| n % 4 != 2).count()
}

#[test]
fn oracle_chain_on_small_region() {
    let spec = full_spec();
    let region = Region::parse(spec.space.clone(), "n=1..120").unwrap();
    let mut chain = DerivationChain::new(spec.clone(), full_steps(&spec), Mode::Oracle, region);
    chain.spot_checks = 2;
    chain.spot_sample = 8;
    let rep = verify_chain(&chain).unwrap();
    assert!(rep.verified(), "{}", rep.table());
    assert_eq!(rep.domain_size, expected_domain(1, 120));
    let squares = (1..=120).filter(|n| (1..=11).any(|k| k * k == *n)).count();
    assert_eq!(rep.steps[0].competent, 0);
    assert_eq!(rep.steps[1].competent, squares);
    assert_eq!(rep.steps[3].competent, rep.domain_size);
    assert_eq!(rep.termination, Termination::Correct);
    assert!(rep.warnings.is_empty(), "{:?}", rep.warnings);
    let rel: Vec<_> = rep.steps.iter().map(|s| s.reliability.value()).collect();
    assert!(rel.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn reversed_pair_fails_at_three() {
    let spec = full_spec();
    let steps = full_steps(&spec);
    let region = Region::parse(spec.space.clone(), "n=1..50").unwrap();
    let chain = DerivationChain::new(spec, vec![steps[2].clone(), steps[1].clone()], Mode::Oracle, region);
    let rep = verify_chain(&chain).unwrap();
    assert!(!rep.verified());
    assert_eq!(rep.failed_at, Some(1));
    let w = rep.steps[1].witness.as_deref().unwrap();
    assert!(w.starts_with("(3,0,0)"), "{w}");
    assert_eq!(rep.warnings, vec!["step 0 (P2) is not `abort`".to_string()]);
}

#[test]
fn exhaustive_and_oracle_agree_on_tiny_space() {
    let spec = parse_spec(corpus!("tiny", "fermat.spec")).unwrap();
    let steps = vec![
        step(&spec, "p0.prog", corpus!("tiny", "p0.prog")),
        step(&spec, "p1.prog", corpus!("tiny", "p1.prog")),
        step(&spec, "p2.prog", corpus!("tiny", "p2.prog")),
        step(&spec, "p3.prog", corpus!("tiny", "p3.prog")),
    ];
    let region = Region::full(spec.space.clone());
    let ex = verify_chain(&DerivationChain::new(
        spec.clone(),
        steps.clone(),
        Mode::Exhaustive,
        region.clone(),
    ))
    .unwrap();
    let or = verify_chain(&DerivationChain::new(spec, steps, Mode::Oracle, region)).unwrap();
    assert!(ex.verified(), "{}", ex.table());
    assert!(or.verified(), "{}", or.table());
    assert_eq!(ex.domain_size, or.domain_size);
    for (a, b) in ex.steps.iter().zip(&or.steps) {
        assert_eq!(
            (a.competent, &a.reliability),
            (b.competent, &b.reliability),
            "{}",
            a.name
        );
    }
    assert_eq!(ex.termination, Termination::Correct);
}

#[test]
fn threshold_termination() {
    let spec = full_spec();
    let steps: Vec<_> = full_steps(&spec).into_iter().take(3).collect();
    let region = Region::parse(spec.space.clone(), "n=1..40").unwrap();
    let mut chain = DerivationChain::new(spec, steps, Mode::Oracle, region);
    chain.spot_checks = 0;
    assert_eq!(verify_chain(&chain).unwrap().termination, Termination::Neither);
    chain.threshold = Some(parse_rational("0.2").unwrap());
    let rep = verify_chain(&chain).unwrap();
    assert_eq!(rep.termination, Termination::Threshold, "{}", rep.table());
    assert!(rep.spot_check.is_none());
}

#[test]
fn weighted_reliability() {
    let spec = full_spec();
    let steps = full_steps(&spec);
    let StepSource::Program(p1) = &steps[1].source else {
        unreachable!()
    };
    let region = Region::parse(spec.space.clone(), "n={1,3,4}").unwrap();
    let uniform = reliability(p1, &spec, &ReliabilityModel::Uniform, &region, 1000).unwrap();
    assert_eq!((uniform.competent, uniform.domain), (2, 3));
    let weights = HashMap::from([(vec![3, 0, 0], 8)]);
    let model = ReliabilityModel::Weights { weights, default: 1 };
    let weighted = reliability(p1, &spec, &model, &region, 1000).unwrap();
    assert_eq!(weighted.probability, Probability::new(2, 10).unwrap());
}

#[test]
fn low_fuel_is_inconclusive() {
    let spec = full_spec();
    let steps = full_steps(&spec);
    let region = Region::parse(spec.space.clone(), "n=1..30").unwrap();
    let mut chain = DerivationChain::new(spec, steps, Mode::Oracle, region);
    chain.fuel = Some(3);
    let rep = verify_chain(&chain).unwrap();
    assert!(rep.inconclusive.is_some());
    assert!(!rep.verified());
}

#[test]
fn pinned_sensitivity_is_detected() {
    // Competent only when the pinned x starts at 0.
    let spec = parse_spec("space s: nat n : 0..3; nat x : 0..3; spec: x' == n; domain: true;").unwrap();
    let p = parse_program("x = x + n").unwrap().bind(&spec.space).unwrap();
    let region = Region::parse(spec.space.clone(), "n=0..3").unwrap();
    let c = oracle_competence_domain(&p, &spec, &region, 10).unwrap();
    assert_eq!(c.competent_len(), 4);
    let sc = independence_spot_check(&c, &p, &spec, 10, 5, 16, 7).unwrap();
    assert!(!sc.is_clean());
}

#[test]
fn manifest_round_trip() {
    let files = HashMap::from([
        ("fermat.spec", corpus!("tiny", "fermat.spec")),
        ("p0.prog", corpus!("tiny", "p0.prog")),
        ("p1.prog", corpus!("tiny", "p1.prog")),
    ]);
    let text = r#"
        spec = "fermat.spec"
        steps = ["p0.prog", "p1.prog"]
        mode = "oracle"
        region = "n=0..5"
        threshold = 0.5
        spot_checks = 1
        [distribution]
        kind = "weights"
        default = 1
        weights = { "(4,0,0)" = 3 }
    "#;
    let mut load = |f: &str| {
        files
            .get(f)
            .map(|s| s.to_string())
            .ok_or_else(|| Error::Manifest(format!("no file {f}")))
    };
    let chain = DerivationChain::from_manifest(text, &mut load).unwrap();
    assert_eq!(chain.mode, Mode::Oracle);
    assert_eq!(chain.threshold, Some(parse_rational("1/2").unwrap()));
    let rep = verify_chain(&chain).unwrap();
    // dom(R) is {0,1,3,4,5}; P1 is competent on 0, 1 and 4 (weight 3).
    assert_eq!(rep.steps[1].reliability, Probability::new(5, 7).unwrap());
    assert_eq!(rep.termination, Termination::Threshold);
    assert!(DerivationChain::from_manifest("spec = 1", &mut load).is_err());
    assert!(DerivationChain::from_manifest("spec = \"fermat.spec\"\nsteps = []\nbogus = 1", &mut load).is_err());
}
