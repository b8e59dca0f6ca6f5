//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export takes source text and returns a plain-text report, or throws
//! the error message as a string.

use std::fmt::Write;

use relcheck_core::correctness::{is_correct, more_correct_det, more_correct_nondet, refines, Judgment};
use relcheck_core::derivation::{default_fuel, parse_state, reliability, ReliabilityModel};
use relcheck_core::proglang::{interpret, parse_program, BoundProgram, NoOutcome, Outcome};
use relcheck_core::region::Region;
use relcheck_core::relcore::parse_relation;
use relcheck_core::speclang::parse_spec;
use relcheck_core::Error;
use wasm_bindgen::prelude::*;

fn fail(what: &str, e: Error) -> JsValue {
    JsValue::from_str(&format!("{what}: {e}"))
}

fn describe(out: &mut String, j: &Judgment, names: &str) {
    let rec = j.record();
    let _ = writeln!(out, "{}({names}): {}", rec.kind, rec.verdict);
    for d in &rec.domains {
        let _ = writeln!(out, "  {}: {} states", d.label, d.size);
    }
    if let Some(w) = &rec.witness {
        let _ = writeln!(out, "  witness: {} ({})", w.evidence, w.reason);
    }
}

/// Refinement, correctness and relative correctness of two relation
/// literals against a third. The candidate declares the space inline; the
/// other two may name it.
#[wasm_bindgen]
pub fn judge(candidate: &str, baseline: &str, spec: &str) -> Result<String, JsValue> {
    let p2 = parse_relation(candidate, None).map_err(|e| fail("candidate", e))?;
    let space = p2.space().clone();
    let p1 = parse_relation(baseline, Some(&space)).map_err(|e| fail("baseline", e))?;
    let r = parse_relation(spec, Some(&space)).map_err(|e| fail("spec", e))?;
    let mut out = String::new();
    let run = |out: &mut String| -> Result<(), Error> {
        describe(out, &refines(&p2, &p1)?, "P', P");
        describe(out, &is_correct(&p1, &r)?, "P, R");
        describe(out, &is_correct(&p2, &r)?, "P', R");
        let mc = if p1.is_deterministic() && p2.is_deterministic() {
            more_correct_det(&p2, &p1, &r)?
        } else {
            more_correct_nondet(&p2, &p1, &r)?
        };
        describe(out, &mc, "P', P, R");
        Ok(())
    };
    run(&mut out).map_err(|e| fail("judgment", e))?;
    Ok(out)
}

fn program_for(src: &str, spec: &str) -> Result<(BoundProgram, relcheck_core::speclang::SpecFile), JsValue> {
    let s = parse_spec(spec).map_err(|e| fail("spec", e))?;
    let p = parse_program(src)
        .and_then(|p| p.bind(&s.space))
        .map_err(|e| fail("program", e))?;
    Ok((p, s))
}

/// Runs a program from one state of the spec's space.
#[wasm_bindgen]
pub fn run_program(src: &str, spec: &str, state: &str) -> Result<String, JsValue> {
    let (p, s) = program_for(src, spec)?;
    let st = parse_state(state, &s.space).map_err(|e| fail("state", e))?;
    let fuel = default_fuel(&p);
    let out = interpret(&p, &st, fuel).map_err(|e| fail("run", e))?;
    let mut text = format!("{}: {out}\n", p.name());
    if let Outcome::Final(f) = &out {
        let ok = s.spec.holds(&st, f);
        let _ = writeln!(text, "final state {} R", if ok { "satisfies" } else { "violates" });
    } else if out == Outcome::NoOutcome(NoOutcome::FuelExhausted) {
        let _ = writeln!(text, "no final state within {fuel} loop iterations");
    }
    Ok(text)
}

/// Reliability of a program over an initial region, by running it on every
/// state of the region.
#[wasm_bindgen]
pub fn program_reliability(src: &str, spec: &str, region: &str) -> Result<String, JsValue> {
    let (p, s) = program_for(src, spec)?;
    let region = Region::parse(s.space.clone(), region).map_err(|e| fail("region", e))?;
    let fuel = default_fuel(&p);
    let rep = reliability(&p, &s, &ReliabilityModel::Uniform, &region, fuel).map_err(|e| fail("reliability", e))?;
    Ok(format!(
        "{}: dom(R∩P) has {} of {} states of dom(R) in {region}\nreliability {} (exact {}/{})\n",
        rep.program, rep.competent, rep.domain, rep.probability, rep.probability.num, rep.probability.den
    ))
}
