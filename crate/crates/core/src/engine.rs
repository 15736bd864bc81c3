//! Biconditional equivalence by exhaustive enumeration.
//!
//! Numeric variables are abstracted to a finite set of boundary values per
//! comparison class (variables linked by var-vs-var comparisons, plus every
//! constant they meet). Atoms only compare numbers by order, so an atom's
//! truth value depends only on the order type of the bindings relative to
//! each other and to the constants. The candidate set realizes every such
//! order type, which makes the enumeration a decision procedure for the
//! supported atom language.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::ir::{free_variables, Assignment, Atom, CmpOp, Formula, Operand, Signature, Sort, Value};

pub const DEFAULT_PLAN_LIMIT: u64 = 1 << 20;

pub const SOUNDNESS_NOTE: &str = "EQUIVALENT is relative to the boundary-value domain plan, \
which realizes every order type of the numeric bindings; exact for order-comparison atoms";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("PLAN_TOO_LARGE: {size} assignments exceed the limit of {limit}")]
    PlanTooLarge { size: u128, limit: u64 },
    #[error("SIGNATURE_MISMATCH: {0}")]
    SignatureMismatch(String),
}

impl EngineError {
    pub fn code(&self) -> &'static str {
        match self {
            EngineError::PlanTooLarge { .. } => "PLAN_TOO_LARGE",
            EngineError::SignatureMismatch(_) => "SIGNATURE_MISMATCH",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Equivalent,
    NotEquivalent,
    Aborted,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Equivalent => "EQUIVALENT",
            Verdict::NotEquivalent => "NOT_EQUIVALENT",
            Verdict::Aborted => "ABORTED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub verdict: Verdict,
    /// `P_A → P_B` holds on every planned assignment.
    pub forward_holds: bool,
    /// `P_B → P_A` holds on every planned assignment.
    pub reverse_holds: bool,
    /// First assignment (enumeration order) where the two sides differ.
    pub witness: Option<Assignment>,
    /// Truth values of (P_A, P_B) at the witness.
    pub witness_values: Option<(bool, bool)>,
    pub assignments_checked: u64,
    pub plan_size: u64,
    pub ungrounded_left: Vec<String>,
    pub ungrounded_right: Vec<String>,
    pub note: String,
}

impl EquivalenceReport {
    /// Report for a check that could not run, e.g. an oversized plan.
    pub fn aborted(reason: impl Into<String>) -> Self {
        EquivalenceReport {
            verdict: Verdict::Aborted,
            forward_holds: false,
            reverse_holds: false,
            witness: None,
            witness_values: None,
            assignments_checked: 0,
            plan_size: 0,
            ungrounded_left: Vec::new(),
            ungrounded_right: Vec::new(),
            note: reason.into(),
        }
    }
}

/// Finite test set per variable, variables sorted by name, values sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainPlan {
    vars: Vec<(String, Vec<Value>)>,
}

impl DomainPlan {
    pub fn variables(&self) -> impl Iterator<Item = (&str, &[Value])> {
        self.vars.iter().map(|(n, v)| (n.as_str(), v.as_slice()))
    }

    pub fn test_set(&self, var: &str) -> Option<&[Value]> {
        self.vars
            .iter()
            .find(|(n, _)| n == var)
            .map(|(_, v)| v.as_slice())
    }

    /// Product of the test-set sizes (1 for an empty plan).
    pub fn total_size(&self) -> u128 {
        self.vars
            .iter()
            .fold(1u128, |acc, (_, v)| acc.saturating_mul(v.len() as u128))
    }
}

/// Plans the variables occurring in either formula.
pub fn build_domain_plan(
    sig: &Signature,
    f_a: &Formula,
    f_b: &Formula,
    limit: u64,
) -> Result<DomainPlan, EngineError> {
    for f in [f_a, f_b] {
        f.check(sig)
            .map_err(|e| EngineError::SignatureMismatch(e.to_string()))?;
    }
    let mut vars: BTreeSet<String> = free_variables(f_a);
    vars.extend(free_variables(f_b));

    let classes = comparison_classes(sig, &vars, [f_a, f_b]);
    let mut planned = Vec::with_capacity(vars.len());
    for name in &vars {
        let values = match sig.get(name).expect("checked above") {
            Sort::Bool => vec![Value::Bool(false), Value::Bool(true)],
            Sort::Enum(values) => {
                let mut sorted = values.clone();
                sorted.sort();
                sorted.into_iter().map(Value::Enum).collect()
            }
            Sort::Numeric { .. } => classes[name].iter().copied().map(Value::Int).collect(),
        };
        planned.push((name.clone(), values));
    }
    let plan = DomainPlan { vars: planned };
    let size = plan.total_size();
    if size > limit as u128 {
        return Err(EngineError::PlanTooLarge { size, limit });
    }
    Ok(plan)
}

/// Candidate integer values for every numeric variable, grouped by class.
fn comparison_classes<'a>(
    sig: &Signature,
    vars: &BTreeSet<String>,
    formulas: impl IntoIterator<Item = &'a Formula>,
) -> BTreeMap<String, Vec<i64>> {
    let numeric: Vec<&String> = vars
        .iter()
        .filter(|v| matches!(sig.get(v), Some(Sort::Numeric { .. })))
        .collect();
    let index: BTreeMap<&str, usize> = numeric
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let mut parent: Vec<usize> = (0..numeric.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }

    let mut constants: Vec<(usize, i64)> = Vec::new();
    for f in formulas {
        for atom in f.atoms() {
            if let Atom::NumCmp { var, rhs, .. } = atom {
                let a = index[var.as_str()];
                match rhs {
                    Operand::Const(c) => constants.push((a, *c)),
                    Operand::Var(r) => {
                        let (ra, rb) = (find(&mut parent, a), find(&mut parent, index[r.as_str()]));
                        parent[ra] = rb;
                    }
                }
            }
        }
    }

    let mut members: BTreeMap<usize, usize> = BTreeMap::new();
    let mut class_constants: BTreeMap<usize, BTreeSet<i64>> = BTreeMap::new();
    for i in 0..numeric.len() {
        *members.entry(find(&mut parent, i)).or_default() += 1;
    }
    for (var, c) in constants {
        class_constants
            .entry(find(&mut parent, var))
            .or_default()
            .insert(c);
    }

    let empty = BTreeSet::new();
    numeric
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let root = find(&mut parent, i);
            let ks = class_constants.get(&root).unwrap_or(&empty);
            ((*name).clone(), numeric_candidates(ks, members[&root]))
        })
        .collect()
}

/// Boundary values for one comparison class with constants `ks` and `m`
/// member variables.
///
/// With no constants this is `0..=2m`. Otherwise it holds `c-1, c, c+1` for
/// every constant, sentinels down to `min-max(2,m)` and up to
/// `max+max(2,m)`, and up to `m` values inside each gap next to either
/// bounding constant, so `m` pairwise distinct variables fit in any gap
/// that can hold them.
pub fn numeric_candidates(ks: &BTreeSet<i64>, m: usize) -> Vec<i64> {
    let m = m.max(1) as i64;
    let (Some(&lo), Some(&hi)) = (ks.first(), ks.last()) else {
        return (0..=2 * m).collect();
    };
    let mut out = BTreeSet::new();
    let reach = m.max(2);
    for d in 1..=reach {
        out.insert(lo.saturating_sub(d));
        out.insert(hi.saturating_add(d));
    }
    let ks: Vec<i64> = ks.iter().copied().collect();
    for &c in &ks {
        out.insert(c.saturating_sub(1));
        out.insert(c);
        out.insert(c.saturating_add(1));
    }
    for pair in ks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        for d in 1..=m {
            if a.saturating_add(d) < b {
                out.insert(a + d);
            }
            if b.saturating_sub(d) > a {
                out.insert(b - d);
            }
        }
    }
    out.into_iter().collect()
}

/// Decides `f_a ↔ f_b` over `sig`.
pub fn decide(
    f_a: &Formula,
    f_b: &Formula,
    sig: &Signature,
    limit: u64,
) -> Result<EquivalenceReport, EngineError> {
    let plan = build_domain_plan(sig, f_a, f_b, limit)?;
    let compiled = Compiled::new(&plan, sig, [f_a, f_b]);
    let (ca, cb) = (&compiled.formulas[0], &compiled.formulas[1]);

    let mut forward = true;
    let mut reverse = true;
    let mut witness: Option<(Vec<usize>, bool, bool)> = None;
    let mut checked = 0u64;
    for_each_assignment(&compiled, |idx, slots| {
        checked += 1;
        let va = ca.eval(slots);
        let vb = cb.eval(slots);
        if va != vb {
            if va {
                forward = false;
            } else {
                reverse = false;
            }
            if witness.is_none() {
                witness = Some((idx.to_vec(), va, vb));
            }
        }
        forward || reverse
    });

    let verdict = if forward && reverse {
        Verdict::Equivalent
    } else {
        Verdict::NotEquivalent
    };
    Ok(EquivalenceReport {
        verdict,
        forward_holds: forward,
        reverse_holds: reverse,
        witness_values: witness.as_ref().map(|(_, a, b)| (*a, *b)),
        witness: witness.map(|(idx, _, _)| plan_assignment(&plan, &idx)),
        assignments_checked: checked,
        plan_size: plan.total_size() as u64,
        ungrounded_left: Vec::new(),
        ungrounded_right: Vec::new(),
        note: SOUNDNESS_NOTE.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Satisfiability {
    /// Satisfiable but not valid; carries the first satisfying assignment.
    Sat(Assignment),
    Unsat,
    /// Holds under every assignment (a vacuous requirement).
    TriviallyValid,
}

pub fn check_satisfiable(
    f: &Formula,
    sig: &Signature,
    limit: u64,
) -> Result<Satisfiability, EngineError> {
    let plan = build_domain_plan(sig, f, f, limit)?;
    let compiled = Compiled::new(&plan, sig, [f]);
    let cf = &compiled.formulas[0];
    let mut first_sat: Option<Vec<usize>> = None;
    let mut all_true = true;
    for_each_assignment(&compiled, |idx, slots| {
        if cf.eval(slots) {
            if first_sat.is_none() {
                first_sat = Some(idx.to_vec());
            }
        } else {
            all_true = false;
        }
        // stop once both a model and a counter-model are known
        !(first_sat.is_some() && !all_true)
    });
    Ok(match first_sat {
        None => Satisfiability::Unsat,
        Some(_) if all_true => Satisfiability::TriviallyValid,
        Some(idx) => Satisfiability::Sat(plan_assignment(&plan, &idx)),
    })
}

fn plan_assignment(plan: &DomainPlan, idx: &[usize]) -> Assignment {
    let mut a = Assignment::new();
    for ((name, values), &i) in plan.vars.iter().zip(idx) {
        a.insert(name.clone(), values[i].clone());
    }
    a
}

/// Odometer over the plan, first variable most significant. `visit` returns
/// false to stop early.
fn for_each_assignment(c: &Compiled, mut visit: impl FnMut(&[usize], &[i64]) -> bool) {
    let n = c.domains.len();
    let mut idx = vec![0usize; n];
    let mut slots: Vec<i64> = c.domains.iter().map(|d| d[0]).collect();
    loop {
        if !visit(&idx, &slots) {
            return;
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < c.domains[pos].len() {
                slots[pos] = c.domains[pos][idx[pos]];
                break;
            }
            idx[pos] = 0;
            slots[pos] = c.domains[pos][0];
        }
    }
}

/// Formulas lowered to slot indices; every value is an `i64` code
/// (bool as 0/1, enum as declared-value index, numeric as itself).
struct Compiled {
    domains: Vec<Vec<i64>>,
    formulas: Vec<Node>,
}

enum Node {
    Bool(usize),
    EnumEq(usize, i64),
    CmpConst(usize, CmpOp, i64),
    CmpVar(usize, CmpOp, usize),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
}

impl Compiled {
    fn new<'a>(
        plan: &DomainPlan,
        sig: &Signature,
        formulas: impl IntoIterator<Item = &'a Formula>,
    ) -> Self {
        let slot: BTreeMap<&str, usize> = plan
            .vars
            .iter()
            .enumerate()
            .map(|(i, (n, _))| (n.as_str(), i))
            .collect();
        let enum_code = |var: &str, value: &str| -> i64 {
            sig.get(var)
                .and_then(Sort::enum_values)
                .and_then(|vs| vs.iter().position(|v| v == value))
                .expect("checked by build_domain_plan") as i64
        };
        let domains = plan
            .vars
            .iter()
            .map(|(name, values)| {
                values
                    .iter()
                    .map(|v| match v {
                        Value::Bool(b) => *b as i64,
                        Value::Enum(e) => enum_code(name, e),
                        Value::Int(n) => *n,
                    })
                    .collect()
            })
            .collect();
        fn lower(
            f: &Formula,
            slot: &BTreeMap<&str, usize>,
            enum_code: &dyn Fn(&str, &str) -> i64,
        ) -> Node {
            let sub = |g: &Formula| Box::new(lower(g, slot, enum_code));
            match f {
                Formula::Atom(Atom::BoolVar(v)) => Node::Bool(slot[v.as_str()]),
                Formula::Atom(Atom::EnumEq { var, value }) => {
                    Node::EnumEq(slot[var.as_str()], enum_code(var, value))
                }
                Formula::Atom(Atom::NumCmp { var, op, rhs }) => match rhs {
                    Operand::Const(c) => Node::CmpConst(slot[var.as_str()], *op, *c),
                    Operand::Var(r) => Node::CmpVar(slot[var.as_str()], *op, slot[r.as_str()]),
                },
                Formula::Not(g) => Node::Not(sub(g)),
                Formula::And(cs) => Node::And(cs.iter().map(|c| lower(c, slot, enum_code)).collect()),
                Formula::Or(cs) => Node::Or(cs.iter().map(|c| lower(c, slot, enum_code)).collect()),
                Formula::Implies(l, r) => Node::Implies(sub(l), sub(r)),
                Formula::Iff(l, r) => Node::Iff(sub(l), sub(r)),
            }
        }
        let formulas = formulas
            .into_iter()
            .map(|f| lower(f, &slot, &enum_code))
            .collect();
        Compiled { domains, formulas }
    }
}

impl Node {
    fn eval(&self, s: &[i64]) -> bool {
        match self {
            Node::Bool(i) => s[*i] != 0,
            Node::EnumEq(i, code) => s[*i] == *code,
            Node::CmpConst(i, op, c) => op.holds(s[*i], *c),
            Node::CmpVar(i, op, j) => op.holds(s[*i], s[*j]),
            Node::Not(g) => !g.eval(s),
            Node::And(cs) => cs.iter().all(|c| c.eval(s)),
            Node::Or(cs) => cs.iter().any(|c| c.eval(s)),
            Node::Implies(l, r) => !l.eval(s) || r.eval(s),
            Node::Iff(l, r) => l.eval(s) == r.eval(s),
        }
    }
}
