use std::collections::HashMap;
use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};

use relcheck_core::correctness::{
    is_correct, is_partially_correct, more_correct_det, more_correct_nondet, refines, strictly_more_correct_det,
    Judgment,
};
use relcheck_core::derivation::{
    default_fuel, oracle_competence_domain, parse_state, reliability, verify_chain, DerivationChain, ReliabilityModel,
};
use relcheck_core::proglang::{agreement_check, interpret, NoOutcome, Outcome, ParseOptions};
use relcheck_core::region::Region;
use relcheck_core::relcore::{format_tuple, serialize_relation};
use relcheck_core::speclang::{validate_domain_clause, DomainStatus, WitnessBounds};
use relcheck_core::{Error, Limits};
use serde_json::{json, Value};

use crate::load::{resolve_space, Loader, Operand};
use crate::{Command, Failure, Global, Report};

/// Evidence lines printed in table output; JSON output lists everything.
const LISTED: usize = 10;

fn verdict_code(v: bool) -> u8 {
    if v {
        0
    } else {
        1
    }
}

fn judgment_report(j: &Judgment, operands: &[(&str, &Operand)]) -> Report {
    let rec = j.record();
    let names: Vec<&str> = operands.iter().map(|(_, o)| o.name.as_str()).collect();
    let mut table = format!("{}({}): {}\n", rec.kind, names.join(", "), rec.verdict);
    for d in &rec.domains {
        let _ = writeln!(table, "  {}: {} states", d.label, d.size);
    }
    if let Some(v) = &rec.new_violations {
        let _ = writeln!(table, "  candidate pairs outside R on dom(R∩P): {}", v.len());
        for p in v {
            let _ = writeln!(table, "    {p}");
        }
    }
    if let Some(w) = &rec.witness {
        let _ = writeln!(table, "  witness: {} ({})", w.evidence, w.reason);
    }
    let mut json = serde_json::to_value(&rec).expect("record serializes");
    let ops: serde_json::Map<String, Value> = operands
        .iter()
        .map(|(role, o)| (role.to_string(), Value::String(o.name.clone())))
        .collect();
    json["operands"] = Value::Object(ops);
    Report {
        code: verdict_code(rec.verdict),
        table,
        json,
    }
}

fn states_json<'a>(states: impl Iterator<Item = Vec<i64>> + 'a) -> Value {
    Value::Array(states.map(|s| Value::String(format_tuple(&s))).collect())
}

pub fn run(g: &Global, cmd: Command) -> Result<Report, Failure> {
    let limits = g.max_states.map(Limits::with_max_states).unwrap_or_default();
    let loader = Loader {
        limits,
        opts: ParseOptions {
            default_range: g.default_range,
        },
    };
    match cmd {
        Command::Refines { lhs, rhs, space, spec } => {
            let sp = resolve_space(&loader, space.space.as_deref(), spec.as_deref(), &[&lhs, &rhs])?;
            let a = loader.relation(&lhs, &sp)?;
            let b = loader.relation(&rhs, &sp)?;
            let j = refines(&a.rel, &b.rel)?;
            Ok(judgment_report(&j, &[("lhs", &a), ("rhs", &b)]))
        }
        Command::Correct {
            program,
            spec,
            space,
            partial,
        } => {
            let sp = resolve_space(&loader, space.space.as_deref(), Some(&spec), &[])?;
            let p = loader.relation(&program, &sp)?;
            let r = loader.relation(&spec, &sp)?;
            let j = if partial {
                is_partially_correct(&p.rel, &r.rel)?
            } else {
                is_correct(&p.rel, &r.rel)?
            };
            Ok(judgment_report(&j, &[("program", &p), ("spec", &r)]))
        }
        Command::MoreCorrect {
            candidate,
            baseline,
            spec,
            space,
            strict,
            nondet,
        } => {
            let sp = resolve_space(&loader, space.space.as_deref(), Some(&spec), &[])?;
            let p2 = loader.relation(&candidate, &sp)?;
            let p1 = loader.relation(&baseline, &sp)?;
            let r = loader.relation(&spec, &sp)?;
            let det = p1.rel.is_deterministic() && p2.rel.is_deterministic();
            let j = if strict {
                strictly_more_correct_det(&p2.rel, &p1.rel, &r.rel)?
            } else if det && !nondet {
                more_correct_det(&p2.rel, &p1.rel, &r.rel)?
            } else {
                more_correct_nondet(&p2.rel, &p1.rel, &r.rel)?
            };
            Ok(judgment_report(
                &j,
                &[("candidate", &p2), ("baseline", &p1), ("spec", &r)],
            ))
        }
        Command::Competence {
            program,
            spec,
            region,
            fuel,
            states,
        } => competence(&loader, &program, &spec, region.as_deref(), fuel, states),
        Command::Reliability {
            program,
            spec,
            region,
            fuel,
            weights,
            default_weight,
        } => {
            let s = loader.spec(&spec)?;
            let p = loader.program(&program, &s.space)?;
            let region = match region {
                Some(r) => Region::parse(s.space.clone(), &r)?,
                None => Region::full(s.space.clone()),
            };
            let model = if weights.is_empty() {
                ReliabilityModel::Uniform
            } else {
                let mut map = HashMap::new();
                for w in &weights {
                    let (state, weight) = w
                        .rsplit_once('=')
                        .ok_or_else(|| Failure::Usage(format!("--weight `{w}` is not `(state)=weight`")))?;
                    let weight: u64 = weight
                        .trim()
                        .parse()
                        .map_err(|_| Failure::Usage(format!("--weight `{w}` has a bad weight")))?;
                    map.insert(parse_state(state, &s.space)?, weight);
                }
                ReliabilityModel::Weights {
                    weights: map,
                    default: default_weight,
                }
            };
            let fuel = fuel.unwrap_or_else(|| default_fuel(&p));
            let rep = reliability(&p, &s, &model, &region, fuel)?;
            let table = format!(
                "{} reliability {} ({} of {} states, exact {}/{})\n",
                rep.program, rep.probability, rep.competent, rep.domain, rep.probability.num, rep.probability.den
            );
            let json = json!({
                "program": rep.program,
                "region": region.to_string(),
                "competent": rep.competent,
                "domain": rep.domain,
                "reliability": rep.probability.render(4),
                "reliability_exact": format!("{}/{}", rep.probability.num, rep.probability.den),
            });
            Ok(Report { code: 0, table, json })
        }
        Command::VerifyChain { chain, fuel } => verify(&loader, g, &chain, fuel),
        Command::Denote { program, space, spec } => {
            let sp = resolve_space(&loader, space.space.as_deref(), spec.as_deref(), &[])?;
            let p = loader.relation(&program, &sp)?;
            let table = serialize_relation(&p.rel);
            let pairs: Vec<Value> = p
                .rel
                .pairs()
                .map(|(i, j)| {
                    Value::String(format!(
                        "{} -> {}",
                        format_tuple(&sp.state_at(i)),
                        format_tuple(&sp.state_at(j))
                    ))
                })
                .collect();
            let json = json!({
                "program": p.name,
                "space": sp.name(),
                "size": pairs.len(),
                "pairs": pairs,
            });
            Ok(Report { code: 0, table, json })
        }
        Command::Interpret {
            program,
            state,
            fuel,
            space,
            spec,
        } => {
            let sp = resolve_space(&loader, space.space.as_deref(), spec.as_deref(), &[])?;
            let p = loader.program(&program, &sp)?;
            let s = parse_state(&state, &sp)?;
            let fuel = fuel.unwrap_or_else(|| default_fuel(&p));
            let out = interpret(&p, &s, fuel)?;
            let starved = out == Outcome::NoOutcome(NoOutcome::FuelExhausted) && (fuel as u128) < p.sufficient_fuel();
            let json = match &out {
                Outcome::Final(f) => {
                    json!({"program": p.name(), "initial": format_tuple(&s), "final": format_tuple(f)})
                }
                Outcome::NoOutcome(r) => {
                    json!({"program": p.name(), "initial": format_tuple(&s), "no_outcome": r.to_string()})
                }
            };
            Ok(Report {
                code: if starved { 3 } else { 0 },
                table: format!("{}: {}\n", format_tuple(&s), out),
                json,
            })
        }
        Command::Agreement {
            program,
            fuel,
            space,
            spec,
        } => {
            let sp = resolve_space(&loader, space.space.as_deref(), spec.as_deref(), &[])?;
            let p = loader.program(&program, &sp)?;
            let fuel = fuel.unwrap_or_else(|| default_fuel(&p));
            let rep = agreement_check(&p, fuel, &loader.limits)?;
            let mut table = format!(
                "{}: {} states, fuel {}, {} mismatches, {} diverging, {} inconclusive\n",
                rep.program,
                rep.states,
                rep.fuel,
                rep.mismatches.len(),
                rep.diverging.len(),
                rep.inconclusive.len()
            );
            for m in rep.mismatches.iter().take(LISTED) {
                let _ = writeln!(table, "  {m}");
            }
            if rep.mismatches.len() > LISTED {
                let _ = writeln!(table, "  and {} more", rep.mismatches.len() - LISTED);
            }
            let code = if !rep.agrees() {
                1
            } else if !rep.inconclusive.is_empty() {
                3
            } else {
                0
            };
            let json = json!({
                "program": rep.program,
                "states": rep.states,
                "fuel": rep.fuel,
                "sufficient_fuel": rep.sufficient_fuel.to_string(),
                "agrees": rep.agrees(),
                "mismatches": rep.mismatches.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
                "diverging": states_json(rep.diverging.iter().cloned()),
                "inconclusive": states_json(rep.inconclusive.iter().cloned()),
            });
            Ok(Report { code, table, json })
        }
        Command::ValidateDomain { spec, region, bounds } => {
            let s = loader.spec(&spec)?;
            let region = match region {
                Some(r) => Region::parse(s.space.clone(), &r)?,
                None => Region::full(s.space.clone()),
            };
            let bounds = match bounds {
                Some(b) => WitnessBounds::parse(&s.space, &b)?,
                None => WitnessBounds::declared(&s.space),
            };
            let rep = validate_domain_clause(&s, &region, &bounds);
            if rep.status == DomainStatus::NothingToValidate {
                return Ok(Report {
                    code: 0,
                    table: "no domain clause to validate\n".into(),
                    json: json!({"status": "nothing-to-validate"}),
                });
            }
            let mut table = format!(
                "checked {} states: {} violations, {} inconclusive\n",
                rep.checked,
                rep.violations.len(),
                rep.inconclusive.len()
            );
            for v in rep.violations.iter().take(LISTED) {
                let _ = writeln!(table, "  {v}");
            }
            if rep.violations.len() > LISTED {
                let _ = writeln!(table, "  and {} more", rep.violations.len() - LISTED);
            }
            let code = if !rep.violations.is_empty() {
                1
            } else if !rep.inconclusive.is_empty() {
                3
            } else {
                0
            };
            let json = json!({
                "status": "checked",
                "checked": rep.checked,
                "violations": rep.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "inconclusive": states_json(rep.inconclusive.iter().cloned()),
            });
            Ok(Report { code, table, json })
        }
    }
}

fn competence(
    loader: &Loader,
    program: &Path,
    spec: &Path,
    region: Option<&str>,
    fuel: Option<u64>,
    list: bool,
) -> Result<Report, Failure> {
    let s = loader.spec(spec)?;
    let (name, mode, region_text, domain, competent): (String, &str, String, usize, Vec<Vec<i64>>) = match region {
        Some(r) => {
            let p = loader.program(program, &s.space)?;
            let region = Region::parse(s.space.clone(), r)?;
            let fuel = fuel.unwrap_or_else(|| default_fuel(&p));
            let c = oracle_competence_domain(&p, &s, &region, fuel)?;
            if let Some(st) = c.inconclusive.first() {
                return Err(Error::Inconclusive(format!(
                    "fuel ran out below the sufficient bound for `{}` at {}",
                    c.program,
                    format_tuple(st)
                ))
                .into());
            }
            let states = c.states().collect();
            (c.program.clone(), "oracle", region.to_string(), c.domain_len(), states)
        }
        None => {
            let p = loader.relation(program, &s.space)?;
            let r = s
                .materialize(&loader.limits)
                .map_err(|e| e.in_file(spec.display().to_string()))?;
            let dom = r.domain();
            let c = relcheck_core::correctness::competence_domain(&p.rel, &r)?;
            let states = c.states().collect();
            (p.name, "exhaustive", "all".to_string(), dom.len(), states)
        }
    };
    let mut table = format!(
        "{name}: dom(R∩P) has {} of {domain} states of dom(R) ({mode}, region {region_text})\n",
        competent.len()
    );
    if list {
        for st in &competent {
            let _ = writeln!(table, "  {}", format_tuple(st));
        }
    }
    let json = json!({
        "program": name,
        "mode": mode,
        "region": region_text,
        "domain": domain,
        "competent": competent.len(),
        "states": states_json(competent.into_iter()),
    });
    Ok(Report { code: 0, table, json })
}

fn verify(loader: &Loader, g: &Global, path: &PathBuf, fuel: Option<u64>) -> Result<Report, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut load = |f: &str| -> relcheck_core::Result<String> {
        let p = dir.join(f);
        fs::read_to_string(&p).map_err(|e| Error::Manifest(format!("{}: {e}", p.display())))
    };
    let mut chain =
        DerivationChain::from_manifest(&text, &mut load).map_err(|e| e.in_file(path.display().to_string()))?;
    if fuel.is_some() {
        chain.fuel = fuel;
    }
    if g.max_states.is_some() {
        chain.limits = loader.limits;
    }
    let rep = verify_chain(&chain)?;
    let code = if rep.inconclusive.is_some() {
        3
    } else {
        verdict_code(rep.verified())
    };
    Ok(Report {
        code,
        table: rep.table(),
        json: serde_json::to_value(rep.record()).expect("record serializes"),
    })
}
