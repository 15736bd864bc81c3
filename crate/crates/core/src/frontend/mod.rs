//! Rule-based formalizers: controlled requirement sentences and Gherkin
//! scenarios.

pub mod gherkin;
mod phrase;
pub mod requirement;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::ir::{IrError, Signature, Sort, SourceSpan};

pub use gherkin::{
    compile_feature, compile_scenario, parse_feature, parse_feature_in, Examples, GherkinScenario, Step,
};
pub use requirement::{parse_requirement, parse_requirement_file, RequirementDoc};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// Byte offset into a requirement sentence.
    Offset(usize),
    LineCol { line: usize, column: usize },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Offset(o) => write!(f, "offset {o}"),
            Location::LineCol { line, column } => write!(f, "{line}:{column}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("PARSE_ERROR at {at}: expected {expected}, found {found}")]
    Parse {
        at: Location,
        expected: String,
        found: String,
    },
    #[error("UNSUPPORTED_PHRASE at {at}: `{span}` is outside the controlled grammar")]
    UnsupportedPhrase { at: Location, span: String },
    #[error("CONFLICTING_SORT: `{variable}` is used as {first} and as {second}")]
    ConflictingSort {
        variable: String,
        first: String,
        second: String,
    },
    #[error("TABLE_SHAPE_ERROR at line {line}: expected {expected} cells, found {found}")]
    TableShape {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("UNBOUND_PLACEHOLDER at line {line}: `<{name}>` has no Examples column")]
    UnboundPlaceholder { name: String, line: usize },
    #[error(transparent)]
    Ir(#[from] IrError),
}

impl FrontendError {
    pub fn code(&self) -> &'static str {
        match self {
            FrontendError::Parse { .. } => "PARSE_ERROR",
            FrontendError::UnsupportedPhrase { .. } => "UNSUPPORTED_PHRASE",
            FrontendError::ConflictingSort { .. } => "CONFLICTING_SORT",
            FrontendError::TableShape { .. } => "TABLE_SHAPE_ERROR",
            FrontendError::UnboundPlaceholder { .. } => "UNBOUND_PLACEHOLDER",
            FrontendError::Ir(e) => e.code(),
        }
    }

    /// Rebases an error located by byte offset into `text` onto a line and
    /// column, where `column` is where `text` starts.
    pub(crate) fn relocate(self, line: usize, column: usize, text: &str) -> Self {
        let at = |at: Location| match at {
            Location::Offset(o) => Location::LineCol {
                line,
                column: column + text.get(..o).map_or(o, |t| t.chars().count()),
            },
            other => other,
        };
        match self {
            FrontendError::Parse {
                at: a,
                expected,
                found,
            } => FrontendError::Parse {
                at: at(a),
                expected,
                found,
            },
            FrontendError::UnsupportedPhrase { at: a, span } => {
                FrontendError::UnsupportedPhrase { at: at(a), span }
            }
            other => other,
        }
    }
}

/// Value name used to complete an enum that was only ever compared with a
/// single value: it stands for "any other value".
pub const RESIDUAL_VALUE: &str = "other";

#[derive(Debug, Clone)]
enum Usage {
    Bool,
    Enum(Vec<String>),
    Numeric,
}

impl Usage {
    fn describe(&self) -> String {
        match self {
            Usage::Bool => "a boolean".into(),
            Usage::Enum(vs) => format!("an enum (values {})", vs.join(", ")),
            Usage::Numeric => "a number".into(),
        }
    }
}

/// Accumulates variable sorts from usage while atoms are produced.
#[derive(Debug, Default)]
pub(crate) struct SortCollector {
    order: Vec<String>,
    usage: BTreeMap<String, Usage>,
    origin: BTreeMap<String, SourceSpan>,
}

impl SortCollector {
    pub(crate) fn note_origin(&mut self, name: &str, span: SourceSpan) {
        self.origin.entry(name.to_string()).or_insert(span);
    }

    fn record(&mut self, name: &str, usage: Usage) -> Result<(), FrontendError> {
        match self.usage.get_mut(name) {
            None => {
                self.order.push(name.to_string());
                self.usage.insert(name.to_string(), usage);
                Ok(())
            }
            Some(existing) => match (existing, usage) {
                (Usage::Bool, Usage::Bool) | (Usage::Numeric, Usage::Numeric) => Ok(()),
                (Usage::Enum(values), Usage::Enum(new)) => {
                    for v in new {
                        if !values.contains(&v) {
                            values.push(v);
                        }
                    }
                    Ok(())
                }
                (existing, new) => Err(FrontendError::ConflictingSort {
                    variable: name.to_string(),
                    first: existing.describe(),
                    second: new.describe(),
                }),
            },
        }
    }

    pub(crate) fn use_bool(&mut self, name: &str) -> Result<(), FrontendError> {
        self.record(name, Usage::Bool)
    }

    pub(crate) fn use_numeric(&mut self, name: &str) -> Result<(), FrontendError> {
        self.record(name, Usage::Numeric)
    }

    pub(crate) fn use_enum(&mut self, name: &str, value: &str) -> Result<(), FrontendError> {
        self.record(name, Usage::Enum(vec![value.to_string()]))
    }

    /// Declares every variable in first-use order.
    pub(crate) fn finish(self) -> Result<Signature, FrontendError> {
        let mut sig = Signature::new();
        for name in &self.order {
            let sort = match &self.usage[name] {
                Usage::Bool => Sort::Bool,
                Usage::Numeric => Sort::numeric(),
                Usage::Enum(values) => {
                    let mut values = values.clone();
                    if values.len() < 2 {
                        let mut residual = RESIDUAL_VALUE.to_string();
                        while values.contains(&residual) {
                            residual.push_str("_value");
                        }
                        values.push(residual);
                    }
                    Sort::enumeration(values)?
                }
            };
            sig.declare(name.as_str(), sort)?;
            if let Some(span) = self.origin.get(name) {
                sig.set_provenance(name, span.clone());
            }
        }
        Ok(sig)
    }
}
