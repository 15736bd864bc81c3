//! Typed propositional intermediate representation.
//!
//! Every frontend (controlled requirements, Gherkin scenarios, Lean defs)
//! lowers into [`Formula`] paired with a [`Signature`]; the equivalence
//! engine and the Lean emitter consume the same pair.

pub(crate) mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use text::{parse_ir, serialize_ir};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IrError {
    #[error("UNBOUND_VARIABLE: `{0}` has no binding in the assignment")]
    UnboundVariable(String),
    #[error("SORT_ERROR: `{var}` {message}")]
    SortError { var: String, message: String },
    #[error("undeclared variable `{0}`")]
    UndeclaredVariable(String),
    #[error("duplicate declaration of `{0}`")]
    DuplicateVariable(String),
    #[error("invalid identifier `{0}` (expected [a-z][a-z0-9_]*)")]
    InvalidName(String),
    #[error("invalid sort: {0}")]
    InvalidSort(String),
    #[error("ill-formed formula: {0}")]
    IllFormed(String),
    #[error("MALFORMED_IR at {line}:{column}: {message}")]
    Malformed {
        line: usize,
        column: usize,
        message: String,
    },
}

impl IrError {
    /// Stable error code used by reports and exit-code mapping.
    pub fn code(&self) -> &'static str {
        match self {
            IrError::UnboundVariable(_) => "UNBOUND_VARIABLE",
            IrError::SortError { .. } => "SORT_ERROR",
            IrError::Malformed { .. } => "MALFORMED_IR",
            IrError::UndeclaredVariable(_)
            | IrError::DuplicateVariable(_)
            | IrError::InvalidName(_)
            | IrError::InvalidSort(_)
            | IrError::IllFormed(_) => "ILL_FORMED",
        }
    }
}

/// Returns true for names matching `[a-z][a-z0-9_]*`.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

/// Lowercase snake-case form of free text: `"SeatBelt Chime"` becomes
/// `seatbelt_chime`. Returns `None` when nothing identifier-like remains.
pub fn snake_case(text: &str) -> Option<String> {
    let mut out = String::new();
    let mut pending_sep = false;
    for c in text.chars() {
        if c.is_alphanumeric() && c.is_ascii() {
            if pending_sep && !out.is_empty() {
                out.push('_');
            }
            pending_sep = false;
            out.push(c.to_ascii_lowercase());
        } else {
            pending_sep = true;
        }
    }
    if out.is_empty() {
        return None;
    }
    if out.starts_with(|c: char| c.is_ascii_digit()) {
        out.insert_str(0, "v_");
    }
    Some(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SortKind {
    Bool,
    Enum,
    Numeric,
}

impl fmt::Display for SortKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SortKind::Bool => "BOOL",
            SortKind::Enum => "ENUM",
            SortKind::Numeric => "NUMERIC",
        })
    }
}

/// Semantic type of a variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Bool,
    /// Ordered, distinct value names; at least two.
    Enum(Vec<String>),
    /// Integer-valued; the unit is a free-text label.
    Numeric { unit: Option<String> },
}

impl Sort {
    pub fn enumeration<I, S>(values: I) -> Result<Sort, IrError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let values: Vec<String> = values.into_iter().map(Into::into).collect();
        if values.len() < 2 {
            return Err(IrError::InvalidSort(format!(
                "enum needs at least two values, got {:?}",
                values
            )));
        }
        let mut seen = BTreeSet::new();
        for v in &values {
            if !is_identifier(v) {
                return Err(IrError::InvalidName(v.clone()));
            }
            if !seen.insert(v.as_str()) {
                return Err(IrError::InvalidSort(format!("duplicate enum value `{v}`")));
            }
        }
        Ok(Sort::Enum(values))
    }

    pub fn numeric() -> Sort {
        Sort::Numeric { unit: None }
    }

    pub fn numeric_with_unit(unit: impl Into<String>) -> Sort {
        Sort::Numeric {
            unit: Some(unit.into()),
        }
    }

    pub fn kind(&self) -> SortKind {
        match self {
            Sort::Bool => SortKind::Bool,
            Sort::Enum(_) => SortKind::Enum,
            Sort::Numeric { .. } => SortKind::Numeric,
        }
    }

    pub fn enum_values(&self) -> Option<&[String]> {
        match self {
            Sort::Enum(values) => Some(values),
            _ => None,
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Bool => f.write_str("bool"),
            Sort::Enum(values) => write!(f, "enum{{{}}}", values.join(",")),
            Sort::Numeric { unit: None } => f.write_str("numeric"),
            Sort::Numeric { unit: Some(u) } => write!(f, "numeric[{u}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableDecl {
    pub name: String,
    pub sort: Sort,
}

/// Where a variable was first seen, for diagnostics only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceSpan {
    pub file: String,
    pub line: usize,
    /// The source-text spelling before snake-casing.
    pub original: String,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{} ({:?})", self.file, self.line, self.original)
    }
}

/// Declared variables in declaration order.
///
/// Equality compares declarations only; provenance is diagnostic metadata
/// and does not survive serialization.
#[derive(Debug, Clone, Default)]
pub struct Signature {
    decls: Vec<VariableDecl>,
    provenance: BTreeMap<String, SourceSpan>,
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.decls == other.decls
    }
}

impl Eq for Signature {}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, name: impl Into<String>, sort: Sort) -> Result<(), IrError> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(IrError::InvalidName(name));
        }
        if self.get(&name).is_some() {
            return Err(IrError::DuplicateVariable(name));
        }
        if let Sort::Enum(values) = &sort {
            // re-run the constructor checks for sorts built by hand
            Sort::enumeration(values.iter().cloned())?;
        }
        self.decls.push(VariableDecl { name, sort });
        Ok(())
    }

    pub fn with(mut self, name: &str, sort: Sort) -> Result<Self, IrError> {
        self.declare(name, sort)?;
        Ok(self)
    }

    pub fn set_provenance(&mut self, name: &str, span: SourceSpan) {
        self.provenance.insert(name.to_string(), span);
    }

    pub fn provenance(&self, name: &str) -> Option<&SourceSpan> {
        self.provenance.get(name)
    }

    pub fn get(&self, name: &str) -> Option<&Sort> {
        self.decls.iter().find(|d| d.name == name).map(|d| &d.sort)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.get(name).is_some()
    }

    pub fn decls(&self) -> &[VariableDecl] {
        &self.decls
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.decls.iter().map(|d| d.name.as_str())
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    /// Keeps only the named declarations, preserving order.
    pub fn restrict(&self, keep: &BTreeSet<String>) -> Signature {
        Signature {
            decls: self
                .decls
                .iter()
                .filter(|d| keep.contains(&d.name))
                .cloned()
                .collect(),
            provenance: self
                .provenance
                .iter()
                .filter(|(k, _)| keep.contains(*k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
    Ne,
}

impl CmpOp {
    pub const ALL: [CmpOp; 6] = [
        CmpOp::Lt,
        CmpOp::Le,
        CmpOp::Eq,
        CmpOp::Ge,
        CmpOp::Gt,
        CmpOp::Ne,
    ];

    /// ASCII spelling used by the IR text format.
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
            CmpOp::Ne => "!=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<CmpOp> {
        Some(match s {
            "<" => CmpOp::Lt,
            "<=" | "≤" => CmpOp::Le,
            "=" | "==" => CmpOp::Eq,
            ">=" | "≥" => CmpOp::Ge,
            ">" => CmpOp::Gt,
            "!=" | "≠" => CmpOp::Ne,
            _ => return None,
        })
    }

    /// The operator with its operands swapped: `a < b` iff `b > a`.
    pub fn flip(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Eq => CmpOp::Eq,
            CmpOp::Ge => CmpOp::Le,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Ne => CmpOp::Ne,
        }
    }

    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ge => CmpOp::Lt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Ne => CmpOp::Eq,
        }
    }

    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ne => lhs != rhs,
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operand {
    Const(i64),
    Var(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    BoolVar(String),
    EnumEq { var: String, value: String },
    NumCmp { var: String, op: CmpOp, rhs: Operand },
}

impl Atom {
    pub fn variables(&self) -> Vec<&str> {
        match self {
            Atom::BoolVar(v) | Atom::EnumEq { var: v, .. } => vec![v],
            Atom::NumCmp { var, rhs, .. } => match rhs {
                Operand::Var(r) => vec![var, r],
                Operand::Const(_) => vec![var],
            },
        }
    }

    /// Applies `f` to every variable name in the atom.
    pub fn map_vars(&self, f: &impl Fn(&str) -> String) -> Atom {
        match self {
            Atom::BoolVar(v) => Atom::BoolVar(f(v)),
            Atom::EnumEq { var, value } => Atom::EnumEq {
                var: f(var),
                value: value.clone(),
            },
            Atom::NumCmp { var, op, rhs } => Atom::NumCmp {
                var: f(var),
                op: *op,
                rhs: match rhs {
                    Operand::Var(r) => Operand::Var(f(r)),
                    c => c.clone(),
                },
            },
        }
    }

    /// Checks the atom against the declared sorts.
    pub fn check(&self, sig: &Signature) -> Result<(), IrError> {
        let sort_of = |v: &str| {
            sig.get(v)
                .ok_or_else(|| IrError::UndeclaredVariable(v.to_string()))
        };
        match self {
            Atom::BoolVar(v) => match sort_of(v)? {
                Sort::Bool => Ok(()),
                other => Err(IrError::SortError {
                    var: v.clone(),
                    message: format!("used as a boolean but declared {other}"),
                }),
            },
            Atom::EnumEq { var, value } => match sort_of(var)? {
                Sort::Enum(values) if values.contains(value) => Ok(()),
                Sort::Enum(values) => Err(IrError::SortError {
                    var: var.clone(),
                    message: format!("has no value `{value}` (declared {values:?})"),
                }),
                other => Err(IrError::SortError {
                    var: var.clone(),
                    message: format!("compared to enum value `{value}` but declared {other}"),
                }),
            },
            Atom::NumCmp { var, rhs, .. } => {
                let mut names = vec![var.as_str()];
                if let Operand::Var(r) = rhs {
                    names.push(r);
                }
                for name in names {
                    let sort = sort_of(name)?;
                    if sort.kind() != SortKind::Numeric {
                        return Err(IrError::SortError {
                            var: name.to_string(),
                            message: format!("used in a numeric comparison but declared {sort}"),
                        });
                    }
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::BoolVar(v) => f.write_str(v),
            Atom::EnumEq { var, value } => write!(f, "(= {var} {value})"),
            Atom::NumCmp { var, op, rhs } => match rhs {
                Operand::Const(c) => write!(f, "({op} {var} {c})"),
                Operand::Var(r) => write!(f, "({op} {var} {r})"),
            },
        }
    }
}

/// Propositional formula over typed atoms. `And`/`Or` carry at least two
/// children.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn bool_var(name: &str) -> Formula {
        Formula::Atom(Atom::BoolVar(name.to_string()))
    }

    pub fn enum_eq(var: &str, value: &str) -> Formula {
        Formula::Atom(Atom::EnumEq {
            var: var.to_string(),
            value: value.to_string(),
        })
    }

    pub fn cmp_const(var: &str, op: CmpOp, c: i64) -> Formula {
        Formula::Atom(Atom::NumCmp {
            var: var.to_string(),
            op,
            rhs: Operand::Const(c),
        })
    }

    pub fn cmp_var(var: &str, op: CmpOp, rhs: &str) -> Formula {
        Formula::Atom(Atom::NumCmp {
            var: var.to_string(),
            op,
            rhs: Operand::Var(rhs.to_string()),
        })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    /// Conjunction; a single child is returned as is.
    ///
    /// # Panics
    ///
    /// Panics on an empty child list.
    pub fn and(mut children: Vec<Formula>) -> Formula {
        assert!(!children.is_empty(), "empty conjunction");
        if children.len() == 1 {
            children.pop().unwrap()
        } else {
            Formula::And(children)
        }
    }

    /// Disjunction; a single child is returned as is.
    ///
    /// # Panics
    ///
    /// Panics on an empty child list.
    pub fn or(mut children: Vec<Formula>) -> Formula {
        assert!(!children.is_empty(), "empty disjunction");
        if children.len() == 1 {
            children.pop().unwrap()
        } else {
            Formula::Or(children)
        }
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Iff(Box::new(lhs), Box::new(rhs))
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.visit_atoms(&mut |a| out.push(a));
        out
    }

    fn visit_atoms<'a>(&'a self, f: &mut impl FnMut(&'a Atom)) {
        match self {
            Formula::Atom(a) => f(a),
            Formula::Not(g) => g.visit_atoms(f),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.visit_atoms(f)),
            Formula::Implies(l, r) | Formula::Iff(l, r) => {
                l.visit_atoms(f);
                r.visit_atoms(f);
            }
        }
    }

    /// Rebuilds the formula with every atom replaced by `f(atom)`.
    pub fn map_atoms(&self, f: &impl Fn(&Atom) -> Formula) -> Formula {
        match self {
            Formula::Atom(a) => f(a),
            Formula::Not(g) => Formula::not(g.map_atoms(f)),
            Formula::And(cs) => Formula::And(cs.iter().map(|c| c.map_atoms(f)).collect()),
            Formula::Or(cs) => Formula::Or(cs.iter().map(|c| c.map_atoms(f)).collect()),
            Formula::Implies(l, r) => Formula::implies(l.map_atoms(f), r.map_atoms(f)),
            Formula::Iff(l, r) => Formula::iff(l.map_atoms(f), r.map_atoms(f)),
        }
    }

    /// Verifies arity and that every atom is well-sorted over `sig`.
    pub fn check(&self, sig: &Signature) -> Result<(), IrError> {
        match self {
            Formula::Atom(a) => a.check(sig),
            Formula::Not(g) => g.check(sig),
            Formula::And(cs) | Formula::Or(cs) => {
                if cs.len() < 2 {
                    return Err(IrError::IllFormed(
                        "and/or need at least two operands".into(),
                    ));
                }
                cs.iter().try_for_each(|c| c.check(sig))
            }
            Formula::Implies(l, r) | Formula::Iff(l, r) => {
                l.check(sig)?;
                r.check(sig)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::And(cs) | Formula::Or(cs) => {
                f.write_str(if matches!(self, Formula::And(_)) {
                    "(and"
                } else {
                    "(or"
                })?;
                for c in cs {
                    write!(f, " {c}")?;
                }
                f.write_str(")")
            }
            Formula::Implies(l, r) => write!(f, "(implies {l} {r})"),
            Formula::Iff(l, r) => write!(f, "(iff {l} {r})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Enum(String),
    Int(i64),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Enum(v) => f.write_str(v),
            Value::Int(n) => write!(f, "{n}"),
        }
    }
}

/// Variable bindings, iterated in name order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    bindings: BTreeMap<String, Value>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, name: &str, value: Value) -> Self {
        self.bindings.insert(name.to_string(), value);
        self
    }

    pub fn insert(&mut self, name: impl Into<String>, value: Value) {
        self.bindings.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.bindings.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Every binding must name a declared variable and respect its sort.
    pub fn check(&self, sig: &Signature) -> Result<(), IrError> {
        for (name, value) in &self.bindings {
            let sort = sig
                .get(name)
                .ok_or_else(|| IrError::UndeclaredVariable(name.clone()))?;
            let ok = match (sort, value) {
                (Sort::Bool, Value::Bool(_)) => true,
                (Sort::Enum(values), Value::Enum(v)) => values.contains(v),
                (Sort::Numeric { .. }, Value::Int(_)) => true,
                _ => false,
            };
            if !ok {
                return Err(IrError::SortError {
                    var: name.clone(),
                    message: format!("bound to `{value}` which is not a value of {sort}"),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}: {v}")?;
        }
        f.write_str("}")
    }
}

/// Truth value of `f` under `a`.
pub fn evaluate(f: &Formula, sig: &Signature, a: &Assignment) -> Result<bool, IrError> {
    a.check(sig)?;
    for var in free_variables(f) {
        if !sig.contains(&var) {
            return Err(IrError::UndeclaredVariable(var));
        }
        if a.get(&var).is_none() {
            return Err(IrError::UnboundVariable(var));
        }
    }
    f.check(sig)?;
    Ok(eval_checked(f, a))
}

fn eval_checked(f: &Formula, a: &Assignment) -> bool {
    match f {
        Formula::Atom(atom) => eval_atom(atom, a),
        Formula::Not(g) => !eval_checked(g, a),
        Formula::And(cs) => cs.iter().all(|c| eval_checked(c, a)),
        Formula::Or(cs) => cs.iter().any(|c| eval_checked(c, a)),
        Formula::Implies(l, r) => !eval_checked(l, a) || eval_checked(r, a),
        Formula::Iff(l, r) => eval_checked(l, a) == eval_checked(r, a),
    }
}

fn eval_atom(atom: &Atom, a: &Assignment) -> bool {
    let int = |name: &str| match a.get(name) {
        Some(Value::Int(n)) => *n,
        _ => unreachable!("checked by evaluate"),
    };
    match atom {
        Atom::BoolVar(v) => matches!(a.get(v), Some(Value::Bool(true))),
        Atom::EnumEq { var, value } => matches!(a.get(var), Some(Value::Enum(x)) if x == value),
        Atom::NumCmp { var, op, rhs } => {
            let rhs = match rhs {
                Operand::Const(c) => *c,
                Operand::Var(r) => int(r),
            };
            op.holds(int(var), rhs)
        }
    }
}

pub fn free_variables(f: &Formula) -> BTreeSet<String> {
    f.atoms()
        .into_iter()
        .flat_map(|a| a.variables())
        .map(str::to_string)
        .collect()
}

/// Flattens nested `And`/`Or`, drops duplicate operands and orders operands
/// by the derived structural order. Implications and biconditionals keep
/// their direction.
pub fn normalize(f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::not(normalize(g)),
        Formula::And(cs) => Formula::and(flatten(cs, true)),
        Formula::Or(cs) => Formula::or(flatten(cs, false)),
        Formula::Implies(l, r) => Formula::implies(normalize(l), normalize(r)),
        Formula::Iff(l, r) => Formula::iff(normalize(l), normalize(r)),
    }
}

fn flatten(children: &[Formula], conj: bool) -> Vec<Formula> {
    let mut flat = Vec::with_capacity(children.len());
    for c in children {
        match (normalize(c), conj) {
            (Formula::And(inner), true) | (Formula::Or(inner), false) => flat.extend(inner),
            (other, _) => flat.push(other),
        }
    }
    flat.sort();
    flat.dedup();
    flat
}
