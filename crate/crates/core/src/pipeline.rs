//! End-to-end helpers: rule-based formalization by input kind, and
//! grounding followed by the equivalence decision.

use std::path::Path;

use thiserror::Error;

use crate::engine::{decide, EngineError, EquivalenceReport};
use crate::frontend::{
    compile_feature, parse_feature_in, parse_requirement, parse_requirement_file, FrontendError,
};
use crate::grounding::{apply_grounding, Grounded, GroundingError, GroundingMap};
use crate::ir::{Formula, Signature};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    Requirement,
    Feature,
}

impl InputKind {
    /// `.feature` is Gherkin; `.req` and `.txt` are requirement sentences.
    pub fn from_path(path: &Path) -> Option<InputKind> {
        match path.extension()?.to_str()? {
            "feature" => Some(InputKind::Feature),
            "req" | "txt" => Some(InputKind::Requirement),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Grounding(#[from] GroundingError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("{0}")]
    Selection(String),
}

/// Formalizes one requirement (selected by `id` when the file holds
/// several) or a whole feature file.
pub fn formalize_rules(
    text: &str,
    file: &str,
    kind: InputKind,
    id: Option<&str>,
) -> Result<(Formula, Signature), PipelineError> {
    match kind {
        InputKind::Feature => {
            if id.is_some() {
                return Err(PipelineError::Selection(
                    "--id applies to requirement files only".into(),
                ));
            }
            let scenarios = parse_feature_in(text, file)?;
            Ok(compile_feature(&scenarios)?)
        }
        InputKind::Requirement => {
            let stem = Path::new(file)
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("requirement");
            let docs = parse_requirement_file(text, file, stem)?;
            let doc = match id {
                Some(id) => docs.iter().find(|d| d.id == id).ok_or_else(|| {
                    PipelineError::Selection(format!("no requirement with id `{id}` in {file}"))
                })?,
                None if docs.len() == 1 => &docs[0],
                None => {
                    let ids: Vec<&str> = docs.iter().map(|d| d.id.as_str()).collect();
                    return Err(PipelineError::Selection(format!(
                        "{file} holds {} requirements ({}); pick one with --id",
                        docs.len(),
                        ids.join(", ")
                    )));
                }
            };
            Ok(parse_requirement(doc)?)
        }
    }
}

#[derive(Debug, Clone)]
pub struct Checked {
    pub grounded: Grounded,
    pub report: EquivalenceReport,
}

/// Grounds `right` into `left` and decides equivalence of the results.
pub fn check_pair(
    left: (&Formula, &Signature),
    right: (&Formula, &Signature),
    g: &GroundingMap,
    limit: u64,
) -> Result<Checked, PipelineError> {
    let grounded = apply_grounding(left, right, g)?;
    let mut report = decide(&grounded.left, &grounded.right, &grounded.signature, limit)?;
    report.ungrounded_left = grounded.diagnostics.ungrounded_left.clone();
    report.ungrounded_right = grounded.diagnostics.ungrounded_right.clone();
    Ok(Checked { grounded, report })
}
