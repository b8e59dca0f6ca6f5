//! Reading input files and turning them into relations.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use relcheck_core::proglang::{denote, parse_program_with, BoundProgram, ParseOptions};
use relcheck_core::relcore::parse_relation;
use relcheck_core::speclang::{parse_space, parse_spec, SpecFile};
use relcheck_core::{Error, Limits, Relation, StateSpace};

use crate::Failure;

pub struct Loader {
    pub limits: Limits,
    pub opts: ParseOptions,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn ext(path: &Path) -> &str {
    path.extension().and_then(|e| e.to_str()).unwrap_or("")
}

fn stem(path: &Path) -> String {
    path.file_stem().and_then(|s| s.to_str()).unwrap_or("?").to_string()
}

/// A relation operand together with a display name.
pub struct Operand {
    pub name: String,
    pub rel: Relation,
}

impl Loader {
    pub fn space(&self, path: &Path) -> Result<Arc<StateSpace>, Failure> {
        let src = read(path)?;
        Ok(parse_space(&src).map_err(|e| e.in_file(path.display().to_string()))?)
    }

    pub fn spec(&self, path: &Path) -> Result<SpecFile, Failure> {
        let src = read(path)?;
        Ok(parse_spec(&src).map_err(|e| e.in_file(path.display().to_string()))?)
    }

    pub fn program(&self, path: &Path, space: &Arc<StateSpace>) -> Result<BoundProgram, Failure> {
        let src = read(path)?;
        let file = path.display().to_string();
        let p = parse_program_with(&src, &self.opts)
            .and_then(|p| p.bind(space))
            .map_err(|e| e.in_file(&file))?;
        for w in p.warnings() {
            eprintln!("{file}: warning: {w}");
        }
        Ok(p)
    }

    /// Space of a `.space`, `.spec` or `.rel` file.
    pub fn space_of(&self, path: &Path) -> Result<Arc<StateSpace>, Failure> {
        match ext(path) {
            "space" => self.space(path),
            "spec" => Ok(self.spec(path)?.space),
            "rel" => {
                let src = read(path)?;
                let rel = parse_relation(&src, None).map_err(|e| e.in_file(path.display().to_string()))?;
                Ok(rel.space().clone())
            }
            _ => Err(Failure::Input(format!(
                "{}: cannot take a state space from this file; pass a .space, .spec or .rel file",
                path.display()
            ))),
        }
    }

    /// Reads a `.rel`, `.prog` or `.spec` file as a relation on `space`.
    /// Programs are named by their header, other files by their stem.
    pub fn relation(&self, path: &Path, space: &Arc<StateSpace>) -> Result<Operand, Failure> {
        let file = path.display().to_string();
        let mut name = stem(path);
        let rel = match ext(path) {
            "rel" => parse_relation(&read(path)?, Some(space)).map_err(|e| e.in_file(&file))?,
            "prog" => {
                let p = self.program(path, space)?;
                name = p.name().to_string();
                denote(&p, &self.limits).map_err(|e| e.in_file(&file))?
            }
            "spec" => {
                let spec = self.spec(path)?;
                if &spec.space != space {
                    return Err(Error::SpaceMismatch {
                        left: spec.space.name().to_string(),
                        right: space.name().to_string(),
                    }
                    .in_file(file)
                    .into());
                }
                spec.materialize(&self.limits).map_err(|e| e.in_file(&file))?
            }
            other => {
                return Err(Failure::Input(format!(
                    "{file}: unknown file type `.{other}`; expected .rel, .prog or .spec"
                )))
            }
        };
        Ok(Operand { name, rel })
    }
}

/// Picks the state space: `--space`, then `--spec`, then the first operand
/// that carries one.
pub fn resolve_space(
    loader: &Loader,
    space: Option<&Path>,
    spec: Option<&Path>,
    operands: &[&Path],
) -> Result<Arc<StateSpace>, Failure> {
    if let Some(p) = space {
        return loader.space_of(p);
    }
    if let Some(p) = spec {
        return loader.space_of(p);
    }
    for p in operands {
        if matches!(ext(p), "rel" | "spec") {
            return loader.space_of(p);
        }
    }
    Err(Failure::Usage(
        "no state space: pass --space or --spec, or use a .rel/.spec operand".into(),
    ))
}
