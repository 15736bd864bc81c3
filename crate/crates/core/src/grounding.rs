//! Grounding: merging two formalizations into one namespace.
//!
//! Right-side names are rewritten into left-side names. Variables with the
//! same name on both sides merge without an explicit alias.
//!
//! Map file grammar (one entry per line, `#` starts a comment):
//!
//! ```text
//! var   <left-var> = <right-var>
//! value <left-var>: <left-value> = <right-value>
//! atom  <left-atom> = <right-atom>
//! ```
//!
//! Atoms use the IR atom syntax (`flag`, `(= var value)`, `(<op> var rhs)`),
//! each written in its own side's names.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::ir::text::atom_from_sexpr;
use crate::ir::{is_identifier, Atom, Formula, Operand, Signature, Sort};
use crate::sexpr::{self, Pos, SExpr};

pub const DEFAULT_THRESHOLD: f64 = 0.34;

/// Prefix of the fresh boolean variables standing for identified atoms.
pub const GROUNDED_ATOM_PREFIX: &str = "grounded_atom_";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundingError {
    #[error("SORT_MISMATCH: left `{left}` is {left_sort} but right `{right}` is {right_sort}")]
    SortMismatch {
        left: String,
        left_sort: String,
        right: String,
        right_sort: String,
    },
    #[error("ALIAS_TO_UNDECLARED: {side} side has no {what} `{name}`")]
    AliasToUndeclared {
        side: Side,
        what: &'static str,
        name: String,
    },
    #[error("NON_INJECTIVE_ALIAS: {side} `{name}` is mapped to both `{first}` and `{second}`")]
    NonInjective {
        side: Side,
        name: String,
        first: String,
        second: String,
    },
    #[error("ALIAS_COLLISION: right-side variables {first} and {second} would both become `{name}`")]
    Collision {
        name: String,
        first: String,
        second: String,
    },
    #[error("ATOM_NOT_FOUND: {side} atom `{atom}` does not occur in the {side} formula")]
    AtomNotFound { side: Side, atom: String },
    #[error("INVALID_ATOM: {side} atom `{atom}`: {message}")]
    InvalidAtom {
        side: Side,
        atom: String,
        message: String,
    },
    #[error("MALFORMED_GROUNDING at {line}:{column}: {message}")]
    Malformed {
        line: usize,
        column: usize,
        message: String,
    },
}

impl GroundingError {
    pub fn code(&self) -> &'static str {
        match self {
            GroundingError::SortMismatch { .. } => "SORT_MISMATCH",
            GroundingError::AliasToUndeclared { .. } => "ALIAS_TO_UNDECLARED",
            GroundingError::NonInjective { .. } => "NON_INJECTIVE_ALIAS",
            GroundingError::Collision { .. } => "ALIAS_COLLISION",
            GroundingError::AtomNotFound { .. } => "ATOM_NOT_FOUND",
            GroundingError::InvalidAtom { .. } => "INVALID_ATOM",
            GroundingError::Malformed { .. } => "MALFORMED_GROUNDING",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueAlias {
    /// Left-side variable name.
    pub var: String,
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroundingMap {
    pub var_aliases: Vec<(String, String)>,
    pub value_aliases: Vec<ValueAlias>,
    /// Atom texts in IR atom syntax, left then right.
    pub atom_identifications: Vec<(String, String)>,
}

impl GroundingMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn alias(mut self, left: &str, right: &str) -> Self {
        self.var_aliases.push((left.into(), right.into()));
        self
    }

    pub fn value_alias(mut self, var: &str, left: &str, right: &str) -> Self {
        self.value_aliases.push(ValueAlias {
            var: var.into(),
            left: left.into(),
            right: right.into(),
        });
        self
    }

    pub fn identify(mut self, left_atom: &str, right_atom: &str) -> Self {
        self.atom_identifications
            .push((left_atom.into(), right_atom.into()));
        self
    }

    pub fn is_empty(&self) -> bool {
        self.var_aliases.is_empty()
            && self.value_aliases.is_empty()
            && self.atom_identifications.is_empty()
    }
}

fn malformed(line: usize, column: usize, message: impl Into<String>) -> GroundingError {
    GroundingError::Malformed {
        line,
        column,
        message: message.into(),
    }
}

pub fn parse_grounding(text: &str) -> Result<GroundingMap, GroundingError> {
    let mut map = GroundingMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        let col = body.len() - body.trim_start().len() + 1;
        let (kw, rest) = trimmed
            .split_once(char::is_whitespace)
            .unwrap_or((trimmed, ""));
        let rest_col = col + kw.len() + (rest.len() - rest.trim_start().len()) + 1;
        let rest = rest.trim();
        let ident = |s: &str, what: &str| -> Result<String, GroundingError> {
            let s = s.trim();
            if is_identifier(s) {
                Ok(s.to_string())
            } else {
                Err(malformed(line, rest_col, format!("expected {what}, found `{s}`")))
            }
        };
        match kw {
            "var" => {
                let (l, r) = rest
                    .split_once('=')
                    .ok_or_else(|| malformed(line, rest_col, "expected `var <left> = <right>`"))?;
                map.var_aliases
                    .push((ident(l, "a variable name")?, ident(r, "a variable name")?));
            }
            "value" => {
                let (var, vals) = rest.split_once(':').ok_or_else(|| {
                    malformed(line, rest_col, "expected `value <var>: <left> = <right>`")
                })?;
                let (l, r) = vals.split_once('=').ok_or_else(|| {
                    malformed(line, rest_col, "expected `value <var>: <left> = <right>`")
                })?;
                map.value_aliases.push(ValueAlias {
                    var: ident(var, "a variable name")?,
                    left: ident(l, "a value name")?,
                    right: ident(r, "a value name")?,
                });
            }
            "atom" => {
                let exprs = sexpr::read_all(rest, Pos { line, column: rest_col })
                    .map_err(|e| malformed(e.pos.line, e.pos.column, e.message))?;
                match exprs.as_slice() {
                    [l, SExpr::Symbol(eq, _), r] if eq == "=" => {
                        map.atom_identifications.push((l.to_string(), r.to_string()))
                    }
                    _ => {
                        return Err(malformed(
                            line,
                            rest_col,
                            "expected `atom <left-atom> = <right-atom>`",
                        ))
                    }
                }
            }
            other => {
                return Err(malformed(
                    line,
                    col,
                    format!("unknown entry `{other}` (expected var, value or atom)"),
                ))
            }
        }
    }
    Ok(map)
}

pub fn render_grounding(map: &GroundingMap) -> String {
    let mut out = String::new();
    for (l, r) in &map.var_aliases {
        out.push_str(&format!("var {l} = {r}\n"));
    }
    for v in &map.value_aliases {
        out.push_str(&format!("value {}: {} = {}\n", v.var, v.left, v.right));
    }
    for (l, r) in &map.atom_identifications {
        out.push_str(&format!("atom {l} = {r}\n"));
    }
    out
}

/// A same-kind sort disagreement that does not block merging, such as
/// different numeric units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortMismatch {
    pub left_var: String,
    pub left_sort: Sort,
    pub right_var: String,
    pub right_sort: Sort,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Suggestion {
    pub left: String,
    pub right: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroundingDiagnostics {
    pub ungrounded_left: Vec<String>,
    pub ungrounded_right: Vec<String>,
    pub sort_mismatches: Vec<SortMismatch>,
    pub suggestions: Vec<Suggestion>,
}

/// An identified atom pair and the boolean that replaced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomIdentification {
    pub variable: String,
    pub left: Atom,
    /// In right-side names, as written in the map.
    pub right: Atom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grounded {
    pub left: Formula,
    pub right: Formula,
    pub signature: Signature,
    pub diagnostics: GroundingDiagnostics,
    /// Right name → merged name, for renamed variables only.
    pub renaming: Vec<(String, String)>,
    pub atoms: Vec<AtomIdentification>,
}

/// Comparison atoms equal up to swapping sides (`x >= y` is `y <= x`).
fn same_atom(a: &Atom, b: &Atom) -> bool {
    fn canon(a: &Atom) -> Atom {
        match a {
            Atom::NumCmp {
                var,
                op,
                rhs: Operand::Var(r),
            } if r < var => Atom::NumCmp {
                var: r.clone(),
                op: op.flip(),
                rhs: Operand::Var(var.clone()),
            },
            other => other.clone(),
        }
    }
    canon(a) == canon(b)
}

fn parse_atom(text: &str, sig: &Signature, side: Side) -> Result<Atom, GroundingError> {
    let invalid = |message: String| GroundingError::InvalidAtom {
        side,
        atom: text.to_string(),
        message,
    };
    let exprs = sexpr::read_all(text, Pos { line: 1, column: 1 }).map_err(|e| invalid(e.message))?;
    let [e] = exprs.as_slice() else {
        return Err(invalid("expected a single atom".into()));
    };
    let undeclared = |name: &str| GroundingError::AliasToUndeclared {
        side,
        what: "variable",
        name: name.to_string(),
    };
    match e {
        SExpr::Symbol(name, _) if !sig.contains(name) => return Err(undeclared(name)),
        SExpr::List(items, _) => {
            if let [_, SExpr::Symbol(var, _), SExpr::Symbol(rhs, _)] = items.as_slice() {
                if !sig.contains(var) {
                    return Err(undeclared(var));
                }
                let numeric = matches!(sig.get(var), Some(Sort::Numeric { .. }));
                if numeric && rhs.parse::<i64>().is_err() && !sig.contains(rhs) {
                    return Err(undeclared(rhs));
                }
            }
        }
        _ => {}
    }
    atom_from_sexpr(e, sig).map_err(|err| invalid(err.to_string()))
}

fn check_injective<'a>(
    pairs: impl Iterator<Item = (&'a str, &'a str)>,
    side: Side,
) -> Result<(), GroundingError> {
    let mut seen: BTreeMap<&str, &str> = BTreeMap::new();
    for (from, to) in pairs {
        if let Some(prev) = seen.insert(from, to) {
            if prev != to {
                return Err(GroundingError::NonInjective {
                    side,
                    name: from.to_string(),
                    first: prev.to_string(),
                    second: to.to_string(),
                });
            }
        }
    }
    Ok(())
}

/// Rewrites the right formula into the left namespace and merges the
/// signatures.
pub fn apply_grounding(
    a: (&Formula, &Signature),
    b: (&Formula, &Signature),
    g: &GroundingMap,
) -> Result<Grounded, GroundingError> {
    let (fa, sa) = a;
    let (fb, sb) = b;

    for (l, r) in &g.var_aliases {
        if !sa.contains(l) {
            return Err(GroundingError::AliasToUndeclared {
                side: Side::Left,
                what: "variable",
                name: l.clone(),
            });
        }
        if !sb.contains(r) {
            return Err(GroundingError::AliasToUndeclared {
                side: Side::Right,
                what: "variable",
                name: r.clone(),
            });
        }
    }
    check_injective(
        g.var_aliases.iter().map(|(l, r)| (l.as_str(), r.as_str())),
        Side::Left,
    )?;
    check_injective(
        g.var_aliases.iter().map(|(l, r)| (r.as_str(), l.as_str())),
        Side::Right,
    )?;

    // Right name → merged name.
    let alias_of: BTreeMap<&str, &str> = g
        .var_aliases
        .iter()
        .map(|(l, r)| (r.as_str(), l.as_str()))
        .collect();
    let rename: BTreeMap<String, String> = sb
        .names()
        .map(|n| (n.to_string(), alias_of.get(n).copied().unwrap_or(n).to_string()))
        .collect();
    let mut claimed: BTreeMap<&str, &str> = BTreeMap::new();
    for d in sb.decls() {
        let target = rename[&d.name].as_str();
        if let Some(prev) = claimed.insert(target, d.name.as_str()) {
            return Err(GroundingError::Collision {
                name: target.to_string(),
                first: prev.to_string(),
                second: d.name.clone(),
            });
        }
    }

    let mut soft = Vec::new();
    for d in sb.decls() {
        let target = &rename[&d.name];
        let Some(left_sort) = sa.get(target) else {
            continue;
        };
        if left_sort.kind() != d.sort.kind() {
            return Err(GroundingError::SortMismatch {
                left: target.clone(),
                left_sort: left_sort.kind().to_string(),
                right: d.name.clone(),
                right_sort: d.sort.kind().to_string(),
            });
        }
        if left_sort != &d.sort && left_sort.kind() == crate::ir::SortKind::Numeric {
            soft.push(SortMismatch {
                left_var: target.clone(),
                left_sort: left_sort.clone(),
                right_var: d.name.clone(),
                right_sort: d.sort.clone(),
            });
        }
    }

    // Right variable → (right value → left value).
    let mut value_map: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    for va in &g.value_aliases {
        let right_var = rename
            .iter()
            .find(|(_, to)| **to == va.var)
            .map(|(from, _)| from.clone());
        let (Some(Sort::Enum(lvals)), Some(rv)) = (sa.get(&va.var), right_var) else {
            let side = if sa.contains(&va.var) { Side::Right } else { Side::Left };
            return Err(GroundingError::AliasToUndeclared {
                side,
                what: "enum variable",
                name: va.var.clone(),
            });
        };
        let Some(Sort::Enum(rvals)) = sb.get(&rv) else {
            return Err(GroundingError::AliasToUndeclared {
                side: Side::Right,
                what: "enum variable",
                name: rv,
            });
        };
        if !lvals.contains(&va.left) {
            return Err(GroundingError::AliasToUndeclared {
                side: Side::Left,
                what: "value",
                name: format!("{}.{}", va.var, va.left),
            });
        }
        if !rvals.contains(&va.right) {
            return Err(GroundingError::AliasToUndeclared {
                side: Side::Right,
                what: "value",
                name: format!("{rv}.{}", va.right),
            });
        }
        value_map
            .entry(rv)
            .or_default()
            .insert(va.right.clone(), va.left.clone());
    }
    for va in &g.value_aliases {
        let pairs: Vec<(&str, &str)> = g
            .value_aliases
            .iter()
            .filter(|o| o.var == va.var)
            .map(|o| (o.left.as_str(), o.right.as_str()))
            .collect();
        check_injective(pairs.iter().copied(), Side::Left)?;
        check_injective(pairs.iter().map(|(l, r)| (*r, *l)), Side::Right)?;
    }

    // Atom identifications, replaced before renaming.
    let mut taken: BTreeSet<String> = sa.names().chain(sb.names()).map(String::from).collect();
    let mut counter = 0;
    let mut atoms = Vec::new();
    for (lt, rt) in &g.atom_identifications {
        let left = parse_atom(lt, sa, Side::Left)?;
        let right = parse_atom(rt, sb, Side::Right)?;
        if !fa.atoms().into_iter().any(|x| same_atom(x, &left)) {
            return Err(GroundingError::AtomNotFound {
                side: Side::Left,
                atom: lt.clone(),
            });
        }
        if !fb.atoms().into_iter().any(|x| same_atom(x, &right)) {
            return Err(GroundingError::AtomNotFound {
                side: Side::Right,
                atom: rt.clone(),
            });
        }
        let variable = loop {
            counter += 1;
            let name = format!("{GROUNDED_ATOM_PREFIX}{counter}");
            if taken.insert(name.clone()) {
                break name;
            }
        };
        atoms.push(AtomIdentification {
            variable,
            left,
            right,
        });
    }
    let substitute = |f: &Formula, pick: &dyn Fn(&AtomIdentification) -> &Atom| {
        f.map_atoms(&|atom| {
            atoms
                .iter()
                .find(|id| same_atom(atom, pick(id)))
                .map(|id| Formula::bool_var(&id.variable))
                .unwrap_or_else(|| Formula::Atom(atom.clone()))
        })
    };
    let left = substitute(fa, &|id| &id.left);
    let right = substitute(fb, &|id| &id.right).map_atoms(&|atom| {
        let renamed = atom.map_vars(&|v| rename.get(v).cloned().unwrap_or_else(|| v.to_string()));
        Formula::Atom(match (atom, renamed) {
            (Atom::EnumEq { var, value }, Atom::EnumEq { var: nv, .. }) => Atom::EnumEq {
                value: value_map
                    .get(var)
                    .and_then(|m| m.get(value))
                    .cloned()
                    .unwrap_or_else(|| value.clone()),
                var: nv,
            },
            (_, other) => other,
        })
    });

    // Merged signature: left declarations (widened by right enum values),
    // then right-only declarations, then identified atoms.
    let right_sort = |d: &crate::ir::VariableDecl| match &d.sort {
        Sort::Enum(vals) => Sort::Enum(
            vals.iter()
                .map(|v| {
                    value_map
                        .get(&d.name)
                        .and_then(|m| m.get(v))
                        .cloned()
                        .unwrap_or_else(|| v.clone())
                })
                .collect(),
        ),
        other => other.clone(),
    };
    let merged_from_right: BTreeMap<&str, Sort> = sb
        .decls()
        .iter()
        .map(|d| (rename[&d.name].as_str(), right_sort(d)))
        .collect();
    let mut signature = Signature::new();
    let declare = |sig: &mut Signature, name: &str, sort: Sort| {
        sig.declare(name, sort)
            .expect("merged declarations are distinct identifiers")
    };
    for d in sa.decls() {
        let sort = match (&d.sort, merged_from_right.get(d.name.as_str())) {
            (Sort::Enum(lv), Some(Sort::Enum(rv))) => {
                let mut vals = lv.clone();
                for v in rv {
                    if !vals.contains(v) {
                        vals.push(v.clone());
                    }
                }
                Sort::Enum(vals)
            }
            (Sort::Numeric { unit: None }, Some(Sort::Numeric { unit: Some(u) })) => {
                Sort::numeric_with_unit(u.clone())
            }
            (s, _) => s.clone(),
        };
        declare(&mut signature, &d.name, sort);
        if let Some(p) = sa.provenance(&d.name) {
            signature.set_provenance(&d.name, p.clone());
        }
    }
    for d in sb.decls() {
        let name = &rename[&d.name];
        if !signature.contains(name) {
            declare(&mut signature, name, merged_from_right[name.as_str()].clone());
            if let Some(p) = sb.provenance(&d.name) {
                signature.set_provenance(name, p.clone());
            }
        }
    }
    for id in &atoms {
        declare(&mut signature, &id.variable, Sort::Bool);
    }

    let aliased_left: BTreeSet<&str> = g.var_aliases.iter().map(|(l, _)| l.as_str()).collect();
    let aliased_right: BTreeSet<&str> = g.var_aliases.iter().map(|(_, r)| r.as_str()).collect();
    let ungrounded_left: Vec<String> = sa
        .names()
        .filter(|n| {
            !aliased_left.contains(n) && !(sb.contains(n) && !aliased_right.contains(n))
        })
        .map(String::from)
        .collect();
    let ungrounded_right: Vec<String> = sb
        .names()
        .filter(|n| !aliased_right.contains(n) && !sa.contains(n))
        .map(String::from)
        .collect();
    let suggestions = suggest_grounding_with(
        &TokenJaccard,
        &sa.restrict(&ungrounded_left.iter().cloned().collect()),
        &sb.restrict(&ungrounded_right.iter().cloned().collect()),
        DEFAULT_THRESHOLD,
    );

    let renaming = sb
        .names()
        .filter(|n| rename[*n] != *n)
        .map(|n| (n.to_string(), rename[n].clone()))
        .collect();

    Ok(Grounded {
        left,
        right,
        signature,
        diagnostics: GroundingDiagnostics {
            ungrounded_left,
            ungrounded_right,
            sort_mismatches: soft,
            suggestions,
        },
        renaming,
        atoms,
    })
}

/// Name similarity in `[0, 1]`; implementations must be symmetric.
pub trait SimilarityScorer {
    fn score(&self, a: &str, b: &str) -> f64;
}

/// Jaccard similarity over snake-case tokens after synonym folding.
///
/// Synonyms: `mean`, `avg` → `average`; `belt` → `seatbelt`;
/// `velocity` → `speed`; `state` → `status`. Adjacent `seat belt` tokens
/// fold to `seatbelt`.
#[derive(Debug, Clone, Copy, Default)]
pub struct TokenJaccard;

pub const SYNONYMS: [(&str, &str); 6] = [
    ("mean", "average"),
    ("avg", "average"),
    ("belt", "seatbelt"),
    ("velocity", "speed"),
    ("state", "status"),
    ("seatbelts", "seatbelt"),
];

pub fn name_tokens(name: &str) -> BTreeSet<String> {
    let raw: Vec<String> = name
        .split('_')
        .filter(|t| !t.is_empty())
        .map(str::to_ascii_lowercase)
        .collect();
    let mut out = BTreeSet::new();
    let mut i = 0;
    while i < raw.len() {
        let tok = if raw[i] == "seat" && raw.get(i + 1).is_some_and(|t| t == "belt") {
            i += 1;
            "seatbelt".to_string()
        } else {
            raw[i].clone()
        };
        let folded = SYNONYMS
            .iter()
            .find(|(from, _)| *from == tok)
            .map_or(tok, |(_, to)| to.to_string());
        out.insert(folded);
        i += 1;
    }
    out
}

impl SimilarityScorer for TokenJaccard {
    fn score(&self, a: &str, b: &str) -> f64 {
        let ta = name_tokens(a);
        let tb = name_tokens(b);
        let union = ta.union(&tb).count();
        if union == 0 {
            return 0.0;
        }
        ta.intersection(&tb).count() as f64 / union as f64
    }
}

pub fn suggest_grounding(sig_a: &Signature, sig_b: &Signature) -> Vec<Suggestion> {
    suggest_grounding_with(&TokenJaccard, sig_a, sig_b, DEFAULT_THRESHOLD)
}

/// Cross pairs scoring at least `threshold`, best first; ties by left then
/// right name.
pub fn suggest_grounding_with(
    scorer: &dyn SimilarityScorer,
    sig_a: &Signature,
    sig_b: &Signature,
    threshold: f64,
) -> Vec<Suggestion> {
    let mut out = Vec::new();
    for l in sig_a.names() {
        for r in sig_b.names() {
            let score = scorer.score(l, r);
            if score >= threshold {
                out.push(Suggestion {
                    left: l.to_string(),
                    right: r.to_string(),
                    score,
                });
            }
        }
    }
    out.sort_by(|x, y| {
        y.score
            .total_cmp(&x.score)
            .then_with(|| x.left.cmp(&y.left))
            .then_with(|| x.right.cmp(&y.right))
    });
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct DraftLine {
    pub left: String,
    pub right: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Draft {
    pub lines: Vec<DraftLine>,
    pub warnings: Vec<String>,
}

impl Draft {
    pub fn map(&self) -> GroundingMap {
        GroundingMap {
            var_aliases: self
                .lines
                .iter()
                .map(|l| (l.left.clone(), l.right.clone()))
                .collect(),
            ..GroundingMap::default()
        }
    }

    /// Map-file text with each line's score as a trailing comment.
    pub fn render(&self) -> String {
        self.lines
            .iter()
            .map(|l| format!("var {} = {}  # score {:.3}\n", l.left, l.right, l.score))
            .collect()
    }
}

/// Proposes a one-to-one variable alias set for user review.
///
/// Renaming aliases come first (greedy by score, same sort kind only), then
/// the name-identical pairs. Nothing here is applied automatically.
pub fn draft_grounding(
    scorer: &dyn SimilarityScorer,
    sig_a: &Signature,
    sig_b: &Signature,
    threshold: f64,
) -> Draft {
    let mut draft = Draft::default();
    let shared: BTreeSet<&str> = sig_a.names().filter(|n| sig_b.contains(n)).collect();
    let keep_a: BTreeSet<String> = sig_a
        .names()
        .filter(|n| !shared.contains(n))
        .map(String::from)
        .collect();
    let keep_b: BTreeSet<String> = sig_b
        .names()
        .filter(|n| !shared.contains(n))
        .map(String::from)
        .collect();
    let candidates =
        suggest_grounding_with(scorer, &sig_a.restrict(&keep_a), &sig_b.restrict(&keep_b), threshold);
    let mut used_l = BTreeSet::new();
    let mut used_r = BTreeSet::new();
    for s in candidates {
        if used_l.contains(&s.left) || used_r.contains(&s.right) {
            continue;
        }
        let (ka, kb) = (sig_a.get(&s.left).unwrap().kind(), sig_b.get(&s.right).unwrap().kind());
        if ka != kb {
            draft.warnings.push(format!(
                "skipped `{}` = `{}` (score {:.3}): {ka} vs {kb}",
                s.left, s.right, s.score
            ));
            continue;
        }
        used_l.insert(s.left.clone());
        used_r.insert(s.right.clone());
        draft.lines.push(DraftLine {
            left: s.left,
            right: s.right,
            score: s.score,
        });
    }
    for n in sig_a.names().filter(|n| shared.contains(n)) {
        draft.lines.push(DraftLine {
            left: n.to_string(),
            right: n.to_string(),
            score: scorer.score(n, n),
        });
    }
    if draft.lines.is_empty() {
        draft.warnings.push(format!(
            "no variable pair reaches the similarity threshold {threshold:.2}"
        ));
    }
    draft
}
