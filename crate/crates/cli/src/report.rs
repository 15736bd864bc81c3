//! The structured check report and its human-readable summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use reqverify_core::engine::EquivalenceReport;
use reqverify_core::grounding::Grounded;
use reqverify_core::ir::Value;
use serde::Serialize;

pub const TOOL: &str = "reqverify";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Directions {
    pub left_implies_right: bool,
    pub right_implies_left: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessValues {
    pub left: bool,
    pub right: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ungrounded {
    pub left: Vec<String>,
    pub right: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainPlan {
    pub size: u64,
    pub assignments_checked: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rename {
    pub right: String,
    pub merged: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentifiedAtom {
    pub variable: String,
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inputs {
    pub left: String,
    pub right: String,
    pub grounding: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProverOutcome {
    pub completed: Option<bool>,
    pub error: Option<String>,
    pub proof: Option<String>,
}

/// Serialized field order is part of the format.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub verdict: String,
    pub directions: Directions,
    pub witness: Option<BTreeMap<String, serde_json::Value>>,
    pub witness_values: Option<WitnessValues>,
    pub ungrounded: Ungrounded,
    pub domain_plan: DomainPlan,
    pub renamed: Vec<Rename>,
    pub identified_atoms: Vec<IdentifiedAtom>,
    pub warnings: Vec<String>,
    pub note: String,
    pub inputs: Inputs,
    pub prover: Option<ProverOutcome>,
    pub tool: String,
    pub version: String,
}

fn json_value(v: &Value) -> serde_json::Value {
    match v {
        Value::Bool(b) => serde_json::Value::Bool(*b),
        Value::Int(n) => serde_json::Value::from(*n),
        Value::Enum(s) => serde_json::Value::String(s.clone()),
    }
}

impl CheckReport {
    pub fn new(report: &EquivalenceReport, grounded: Option<&Grounded>, inputs: Inputs) -> Self {
        let mut warnings = Vec::new();
        if let Some(g) = grounded {
            for m in &g.diagnostics.sort_mismatches {
                warnings.push(format!(
                    "`{}` ({}) and `{}` ({}) were merged despite differing sorts",
                    m.left_var, m.left_sort, m.right_var, m.right_sort
                ));
            }
        }
        for v in &report.ungrounded_left {
            warnings.push(format!("left variable `{v}` is not grounded to the right side"));
        }
        for v in &report.ungrounded_right {
            warnings.push(format!("right variable `{v}` is not grounded to the left side"));
        }
        CheckReport {
            verdict: report.verdict.to_string(),
            directions: Directions {
                left_implies_right: report.forward_holds,
                right_implies_left: report.reverse_holds,
            },
            witness: report
                .witness
                .as_ref()
                .map(|w| w.iter().map(|(k, v)| (k.to_string(), json_value(v))).collect()),
            witness_values: report
                .witness_values
                .map(|(left, right)| WitnessValues { left, right }),
            ungrounded: Ungrounded {
                left: report.ungrounded_left.clone(),
                right: report.ungrounded_right.clone(),
            },
            domain_plan: DomainPlan {
                size: report.plan_size,
                assignments_checked: report.assignments_checked,
            },
            renamed: grounded
                .map(|g| {
                    g.renaming
                        .iter()
                        .map(|(r, m)| Rename { right: r.clone(), merged: m.clone() })
                        .collect()
                })
                .unwrap_or_default(),
            identified_atoms: grounded
                .map(|g| {
                    g.atoms
                        .iter()
                        .map(|a| IdentifiedAtom {
                            variable: a.variable.clone(),
                            left: a.left.to_string(),
                            right: a.right.to_string(),
                        })
                        .collect()
                })
                .unwrap_or_default(),
            warnings,
            note: report.note.clone(),
            inputs,
            prover: None,
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let holds = |b: bool| if b { "holds" } else { "fails" };
        let _ = writeln!(s, "verdict: {}", self.verdict);
        let _ = writeln!(s, "  left -> right: {}", holds(self.directions.left_implies_right));
        let _ = writeln!(s, "  right -> left: {}", holds(self.directions.right_implies_left));
        if let Some(w) = &self.witness {
            let bindings: Vec<String> = w
                .iter()
                .map(|(k, v)| match v {
                    serde_json::Value::String(s) => format!("{k} = {s}"),
                    v => format!("{k} = {v}"),
                })
                .collect();
            let _ = writeln!(s, "  witness: {}", bindings.join(", "));
            if let Some(v) = &self.witness_values {
                let _ = writeln!(s, "  at the witness: left is {}, right is {}", v.left, v.right);
            }
        }
        if !self.ungrounded.left.is_empty() {
            let _ = writeln!(s, "  ungrounded left: {}", self.ungrounded.left.join(", "));
        }
        if !self.ungrounded.right.is_empty() {
            let _ = writeln!(s, "  ungrounded right: {}", self.ungrounded.right.join(", "));
        }
        let _ = writeln!(
            s,
            "  domain plan: {} assignments, {} checked",
            self.domain_plan.size, self.domain_plan.assignments_checked
        );
        if let Some(p) = &self.prover {
            match (&p.completed, &p.error) {
                (Some(true), _) => s.push_str("  prover: returned a proof without sorry\n"),
                (Some(false), _) => s.push_str("  prover: did not complete the proof\n"),
                (_, Some(e)) => {
                    let _ = writeln!(s, "  prover: {e}");
                }
                _ => {}
            }
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        s
    }
}
