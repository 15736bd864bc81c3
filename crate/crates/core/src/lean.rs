//! Lean 4 exchange: `def … : Prop` emission, equivalence theorem emission,
//! and a parser for the Lean subset formalizers are asked to produce.
//!
//! Emission conventions:
//! - bool variables appear as `x = true`, never bare;
//! - numeric variables are `ℤ`, with the unit kept in a `-- unit: …` comment;
//! - each enum variable gets its own `inductive <Name>Value` with
//!   `deriving DecidableEq`, and values are written qualified;
//! - names that collide with Lean keywords are wrapped in `«»`.
//!
//! Accepted input subset:
//!
//! ```text
//! file     := item*
//! item     := "import" … | "open" … | inductive | variable | def
//! inductive:= "inductive" Name ["where"] ("|" ctor)+ ["deriving" Name ("," Name)*]
//! variable := "variable" ("(" name+ ":" type ")")+ ["-- unit: <text>"]
//! def      := "def" name ("(" name+ ":" type ")")* ":" "Prop" ":=" expr
//! type     := Bool | Prop | ℤ | Int | Nat | ℕ | ℝ | Real | String | <inductive>
//! expr     := imp [("↔" | "<->") imp]
//! imp      := or [("→" | "->") imp]
//! or       := and [("∨" | "\/") or]
//! and      := unary [("∧" | "/\") and]
//! unary    := "¬" unary | "(" expr ")" | term [cmp term]
//! cmp      := = | == | ≠ | != | < | <= | ≤ | > | >= | ≥
//! term     := name | integer | "-" integer | "(" "-" integer ")" | string
//!           | Type.ctor | .ctor | true | false
//! ```
//!
//! `ℤ`, `Nat` and `Real` all fold to the IR numeric sort. String-typed
//! variables become enums over the snake-cased literals they are compared
//! with.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::frontend::RESIDUAL_VALUE;
use crate::grounding::{GroundingError, GroundingMap};
use crate::ir::{
    is_identifier, normalize, snake_case, Atom, CmpOp, Formula, IrError, Operand, Signature, Sort,
};

pub const LEAN_HEADER: &str = "import Mathlib.Data.Real.Basic";
pub const DEFAULT_THEOREM_NAME: &str = "req1_eq_req2";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LeanError {
    #[error("LEAN_PARSE_ERROR at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("UNSUPPORTED_LEAN at {line}:{column}: {construct}")]
    Unsupported {
        construct: String,
        line: usize,
        column: usize,
    },
    #[error("EMIT_UNSUPPORTED: {0}")]
    EmitUnsupported(String),
    #[error(transparent)]
    Ir(#[from] IrError),
    #[error(transparent)]
    Grounding(#[from] GroundingError),
}

impl LeanError {
    pub fn code(&self) -> &'static str {
        match self {
            LeanError::Parse { .. } => "LEAN_PARSE_ERROR",
            LeanError::Unsupported { .. } => "UNSUPPORTED_LEAN",
            LeanError::EmitUnsupported(_) => "EMIT_UNSUPPORTED",
            LeanError::Ir(e) => e.code(),
            LeanError::Grounding(e) => e.code(),
        }
    }
}

const KEYWORDS: &[&str] = &[
    "abbrev", "at", "attribute", "axiom", "by", "calc", "class", "def", "deriving", "do", "else",
    "end", "example", "exists", "false", "for", "forall", "from", "fun", "have", "if", "import",
    "in", "inductive", "instance", "lemma", "let", "local", "macro", "match", "mut", "namespace",
    "noncomputable", "notation", "open", "partial", "private", "protected", "return", "section",
    "set_option", "show", "structure", "syntax", "then", "theorem", "true", "universe", "unless",
    "variable", "where", "with", "Prop", "Type", "Sort", "Bool", "True", "False",
];

fn lean_ident(name: &str) -> String {
    if KEYWORDS.contains(&name) {
        format!("«{name}»")
    } else {
        name.to_string()
    }
}

fn camel(name: &str) -> String {
    name.split('_')
        .filter(|p| !p.is_empty())
        .map(|p| {
            let mut cs = p.chars();
            match cs.next() {
                Some(c) => c.to_ascii_uppercase().to_string() + cs.as_str(),
                None => String::new(),
            }
        })
        .collect()
}

/// Lean type names for enum variables, unique within one file.
struct TypeNames {
    by_var: BTreeMap<String, String>,
    used: BTreeSet<String>,
}

impl TypeNames {
    fn new() -> Self {
        TypeNames {
            by_var: BTreeMap::new(),
            used: BTreeSet::new(),
        }
    }

    fn assign(&mut self, var: &str) -> String {
        if let Some(t) = self.by_var.get(var) {
            return t.clone();
        }
        let base = format!("{}Value", camel(var));
        let mut name = base.clone();
        let mut k = 2;
        while self.used.contains(&name) {
            name = format!("{base}{k}");
            k += 1;
        }
        self.used.insert(name.clone());
        self.by_var.insert(var.to_string(), name.clone());
        name
    }
}

fn emit_inductive(out: &mut String, type_name: &str, values: &[String]) {
    out.push_str(&format!("inductive {type_name} where\n"));
    for v in values {
        out.push_str(&format!("  | {}\n", lean_ident(v)));
    }
    out.push_str("  deriving DecidableEq\n\n");
}

fn emit_variable(out: &mut String, name: &str, sort: &Sort, types: &TypeNames) {
    match sort {
        Sort::Bool => out.push_str(&format!("variable ({} : Bool)\n", lean_ident(name))),
        Sort::Numeric { unit } => {
            out.push_str(&format!("variable ({} : ℤ)", lean_ident(name)));
            if let Some(u) = unit {
                out.push_str(&format!(" -- unit: {u}"));
            }
            out.push('\n');
        }
        Sort::Enum(_) => out.push_str(&format!(
            "variable ({} : {})\n",
            lean_ident(name),
            types.by_var[name]
        )),
    }
}

fn lean_op(op: CmpOp) -> &'static str {
    match op {
        CmpOp::Lt => "<",
        CmpOp::Le => "≤",
        CmpOp::Eq => "=",
        CmpOp::Ge => "≥",
        CmpOp::Gt => ">",
        CmpOp::Ne => "≠",
    }
}

fn int_lit(c: i64) -> String {
    if c < 0 {
        format!("({c})")
    } else {
        c.to_string()
    }
}

/// Renders an atom; `ty` gives the Lean type of enum variables.
fn atom_text(a: &Atom, ty: &dyn Fn(&str) -> String) -> String {
    match a {
        Atom::BoolVar(v) => format!("{} = true", lean_ident(v)),
        Atom::EnumEq { var, value } => {
            format!("{} = {}.{}", lean_ident(var), ty(var), lean_ident(value))
        }
        Atom::NumCmp { var, op, rhs } => {
            let rhs = match rhs {
                Operand::Const(c) => int_lit(*c),
                Operand::Var(r) => lean_ident(r),
            };
            format!("{} {} {rhs}", lean_ident(var), lean_op(*op))
        }
    }
}

fn formula_text(f: &Formula, ty: &dyn Fn(&str) -> String) -> String {
    let child = |g: &Formula| match g {
        Formula::Atom(a) => format!("({})", atom_text(a, ty)),
        Formula::Not(_) => formula_text(g, ty),
        _ => format!("({})", formula_text(g, ty)),
    };
    match f {
        Formula::Atom(a) => atom_text(a, ty),
        Formula::Not(g) => format!("¬{}", child(g)),
        Formula::And(cs) => cs.iter().map(child).collect::<Vec<_>>().join(" ∧ "),
        Formula::Or(cs) => cs.iter().map(child).collect::<Vec<_>>().join(" ∨ "),
        Formula::Implies(l, r) => format!("{} → {}", child(l), child(r)),
        Formula::Iff(l, r) => format!("{} ↔ {}", child(l), child(r)),
    }
}

fn check_name(name: &str) -> Result<(), LeanError> {
    if crate::ir::is_identifier(name) {
        Ok(())
    } else {
        Err(LeanError::EmitUnsupported(format!("`{name}` is not a valid definition name")))
    }
}

/// A standalone Lean file defining `f` as a proposition named `name`.
pub fn emit_lean_def(f: &Formula, sig: &Signature, name: &str) -> Result<String, LeanError> {
    check_name(name)?;
    f.check(sig)?;
    let mut types = TypeNames::new();
    let mut out = String::new();
    for d in sig.decls() {
        if let Sort::Enum(values) = &d.sort {
            let t = types.assign(&d.name);
            emit_inductive(&mut out, &t, values);
        }
    }
    for d in sig.decls() {
        emit_variable(&mut out, &d.name, &d.sort, &types);
    }
    let ty = |v: &str| types.by_var[v].clone();
    out.push_str(&format!(
        "\ndef {} : Prop :=\n  {}\n",
        lean_ident(name),
        formula_text(f, &ty)
    ));
    Ok(out)
}

/// Suggested definition name: `initiate_<x>` when the formula ends in a
/// single boolean action, otherwise `fallback`.
pub fn default_def_name(f: &Formula, fallback: &str) -> String {
    match f {
        Formula::Implies(_, r) => match r.as_ref() {
            Formula::Atom(Atom::BoolVar(x)) => format!("initiate_{x}"),
            _ => fallback.to_string(),
        },
        _ => fallback.to_string(),
    }
}

/// Definition names for a theorem pair; the right name gets a `_2` suffix
/// when both would coincide.
pub fn default_def_names(left: &Formula, right: &Formula) -> (String, String) {
    let a = default_def_name(left, "requirement_prop");
    let b = default_def_name(right, "scenario_prop");
    if a == b {
        let b = format!("{b}_2");
        (a, b)
    } else {
        (a, b)
    }
}

pub struct LeanSide<'a> {
    pub formula: &'a Formula,
    pub signature: &'a Signature,
    pub def_name: &'a str,
}

/// The equivalence theorem for two ungrounded formalizations.
///
/// Both definitions keep their own variable names. Each variable alias
/// becomes a hypothesis `(h_<left> : <left> = <right>)` and each atom
/// identification a hypothesis `(h_atom_<n> : (<left>) ↔ (<right>))`.
/// Aliased and name-identical enum variables share one inductive type, with
/// right-side values translated through the value aliases.
pub fn emit_lean_theorem(
    left: LeanSide,
    right: LeanSide,
    g: &GroundingMap,
    theorem_name: &str,
) -> Result<String, LeanError> {
    check_name(left.def_name)?;
    check_name(right.def_name)?;
    check_name(theorem_name)?;
    if left.def_name == right.def_name {
        return Err(LeanError::EmitUnsupported(format!(
            "both definitions are named `{}`",
            left.def_name
        )));
    }
    left.formula.check(left.signature)?;
    right.formula.check(right.signature)?;
    // Validates the map (kinds, injectivity, declared names) up front.
    crate::grounding::apply_grounding(
        (left.formula, left.signature),
        (right.formula, right.signature),
        g,
    )?;

    let (sa, sb) = (left.signature, right.signature);
    let alias_of: BTreeMap<&str, &str> = g
        .var_aliases
        .iter()
        .map(|(l, r)| (r.as_str(), l.as_str()))
        .collect();
    for n in sb.names() {
        if sa.contains(n) && alias_of.get(n).is_some_and(|l| *l != n) {
            return Err(LeanError::EmitUnsupported(format!(
                "right variable `{n}` is aliased away but shares its name with a left variable"
            )));
        }
    }
    // Right var → left var it shares a Lean type with.
    let partner = |r: &str| -> Option<String> {
        alias_of
            .get(r)
            .map(|l| l.to_string())
            .or_else(|| sa.contains(r).then(|| r.to_string()))
    };
    let value_alias = |lvar: &str, rvalue: &str| -> String {
        g.value_aliases
            .iter()
            .find(|va| va.var == lvar && va.right == rvalue)
            .map_or(rvalue.to_string(), |va| va.left.clone())
    };

    let mut types = TypeNames::new();
    let mut inductives: Vec<(String, Vec<String>)> = Vec::new();
    for d in sa.decls() {
        if let Sort::Enum(lv) = &d.sort {
            let mut values = lv.clone();
            let rvar = sb.names().find(|r| partner(r).as_deref() == Some(d.name.as_str()));
            if let Some(Sort::Enum(rv)) = rvar.and_then(|r| sb.get(r)) {
                for v in rv {
                    let v = value_alias(&d.name, v);
                    if !values.contains(&v) {
                        values.push(v);
                    }
                }
            }
            inductives.push((types.assign(&d.name), values));
        }
    }
    for d in sb.decls() {
        if let Sort::Enum(rv) = &d.sort {
            if partner(&d.name).is_none() {
                inductives.push((types.assign(&d.name), rv.clone()));
            }
        }
    }

    let mut out = format!("{LEAN_HEADER}\n\n");
    for (t, values) in &inductives {
        emit_inductive(&mut out, t, values);
    }
    let mut declared = Vec::new();
    for d in sa.decls() {
        emit_variable(&mut out, &d.name, &d.sort, &types);
        declared.push(d.name.clone());
    }
    for d in sb.decls() {
        if sa.contains(&d.name) {
            continue;
        }
        if let (Sort::Enum(_), Some(l)) = (&d.sort, partner(&d.name)) {
            let t = types.by_var[&l].clone();
            out.push_str(&format!("variable ({} : {t})\n", lean_ident(&d.name)));
        } else {
            emit_variable(&mut out, &d.name, &d.sort, &types);
        }
        declared.push(d.name.clone());
    }

    let left_ty = |v: &str| types.by_var[v].clone();
    let right_ty = |v: &str| {
        let key = partner(v).unwrap_or_else(|| v.to_string());
        types.by_var[&key].clone()
    };
    let right_formula = right.formula.map_atoms(&|a| {
        Formula::Atom(match a {
            Atom::EnumEq { var, value } => match partner(var) {
                Some(l) => Atom::EnumEq {
                    var: var.clone(),
                    value: value_alias(&l, value),
                },
                None => a.clone(),
            },
            other => other.clone(),
        })
    });

    out.push_str(&format!(
        "\n-- requirement 1\ndef {} : Prop :=\n  {}\n",
        lean_ident(left.def_name),
        formula_text(left.formula, &left_ty)
    ));
    out.push_str(&format!(
        "\n-- gherkin output 1\ndef {} : Prop :=\n  {}\n",
        lean_ident(right.def_name),
        formula_text(&right_formula, &right_ty)
    ));

    let apply = |def: &str, f: &Formula| {
        let used = crate::ir::free_variables(f);
        let args: Vec<String> = declared
            .iter()
            .filter(|n| used.contains(*n))
            .map(|n| lean_ident(n))
            .collect();
        if args.is_empty() {
            lean_ident(def)
        } else {
            format!("{} {}", lean_ident(def), args.join(" "))
        }
    };

    out.push_str(&format!("\ntheorem {}\n", lean_ident(theorem_name)));
    let mut hyp_names = BTreeSet::new();
    for (l, r) in &g.var_aliases {
        let mut h = format!("h_{l}");
        while !hyp_names.insert(h.clone()) {
            h.push('\'');
        }
        out.push_str(&format!("({h} : {} = {})\n", lean_ident(l), lean_ident(r)));
    }
    let grounded = crate::grounding::apply_grounding(
        (left.formula, left.signature),
        (right.formula, right.signature),
        g,
    )?;
    for (k, id) in grounded.atoms.iter().enumerate() {
        out.push_str(&format!(
            "(h_atom_{} : ({}) ↔ ({}))\n",
            k + 1,
            atom_text(&id.left, &left_ty),
            atom_text(&id.right, &right_ty)
        ));
    }
    out.push_str(&format!(
        ":\n({}) ↔\n({}) := by\n  sorry\n",
        apply(left.def_name, left.formula),
        apply(right.def_name, &right_formula)
    ));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser

#[derive(Debug, Clone, PartialEq)]
enum T {
    Ident(String),
    /// `.ctor` shorthand.
    DotIdent(String),
    Int(i64),
    Str(String),
    Sym(&'static str),
    UnitComment(String),
}

#[derive(Debug, Clone)]
struct Tok {
    t: T,
    line: usize,
    col: usize,
}

const SYMBOLS: &[(&str, &str)] = &[
    (":=", ":="),
    ("<->", "↔"),
    ("->", "→"),
    ("/\\", "∧"),
    ("\\/", "∨"),
    (">=", "≥"),
    ("<=", "≤"),
    ("!=", "≠"),
    ("==", "="),
    ("=>", "=>"),
    ("↔", "↔"),
    ("→", "→"),
    ("∧", "∧"),
    ("∨", "∨"),
    ("¬", "¬"),
    ("≥", "≥"),
    ("≤", "≤"),
    ("≠", "≠"),
    ("=", "="),
    ("<", "<"),
    (">", ">"),
    ("(", "("),
    (")", ")"),
    (":", ":"),
    ("|", "|"),
    (",", ","),
    ("{", "{"),
    ("}", "}"),
    ("[", "["),
    ("]", "]"),
    ("+", "+"),
    ("-", "-"),
    ("*", "*"),
    ("/", "/"),
    ("^", "^"),
    ("%", "%"),
    ("∀", "∀"),
    ("∃", "∃"),
    ("λ", "λ"),
    ("↦", "↦"),
    ("×", "×"),
    ("!", "!"),
    ("@", "@"),
    ("ℤ", "ℤ"),
    ("ℕ", "ℕ"),
    ("ℝ", "ℝ"),
];

/// Enum value for a constructor: `Unfastened` becomes `unfastened`.
fn ctor_value(ctor: &str) -> String {
    if is_identifier(ctor) {
        ctor.to_string()
    } else {
        snake_case(ctor).unwrap_or_else(|| ctor.to_string())
    }
}

fn perr(line: usize, col: usize, message: impl Into<String>) -> LeanError {
    LeanError::Parse {
        line,
        column: col,
        message: message.into(),
    }
}

fn unsupported(line: usize, col: usize, construct: impl Into<String>) -> LeanError {
    LeanError::Unsupported {
        construct: construct.into(),
        line,
        column: col,
    }
}

fn is_ident_start(c: char) -> bool {
    (c.is_alphabetic() && !matches!(c, 'λ' | 'ℤ' | 'ℕ' | 'ℝ')) || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    is_ident_start(c) || c.is_ascii_digit() || c == '\'' || c == '!' || c == '?'
}

fn lex(text: &str) -> Result<Vec<Tok>, LeanError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars.get(*i) == Some(&'\n') {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    let starts = |i: usize, s: &str| s.chars().enumerate().all(|(k, c)| chars.get(i + k) == Some(&c));
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if starts(i, "--") {
            let end = chars[i..].iter().position(|&c| c == '\n').map_or(chars.len(), |p| i + p);
            let body: String = chars[i + 2..end].iter().collect();
            if let Some(unit) = body.trim().strip_prefix("unit:") {
                out.push(Tok {
                    t: T::UnitComment(unit.trim().to_string()),
                    line: tl,
                    col: tc,
                });
            }
            let n = end - i;
            advance(&mut i, &mut line, &mut col, n);
            continue;
        }
        if starts(i, "/-") {
            let mut depth = 0;
            loop {
                if i >= chars.len() {
                    return Err(perr(tl, tc, "unterminated block comment"));
                }
                if starts(i, "/-") {
                    depth += 1;
                    advance(&mut i, &mut line, &mut col, 2);
                } else if starts(i, "-/") {
                    depth -= 1;
                    advance(&mut i, &mut line, &mut col, 2);
                    if depth == 0 {
                        break;
                    }
                } else {
                    advance(&mut i, &mut line, &mut col, 1);
                }
            }
            continue;
        }
        if c == '"' {
            let mut s = String::new();
            let mut j = i + 1;
            loop {
                match chars.get(j) {
                    None | Some('\n') => return Err(perr(tl, tc, "unterminated string literal")),
                    Some('"') => break,
                    Some('\\') if chars.get(j + 1).is_some() => {
                        s.push(chars[j + 1]);
                        j += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        j += 1;
                    }
                }
            }
            let n = j + 1 - i;
            advance(&mut i, &mut line, &mut col, n);
            out.push(Tok { t: T::Str(s), line: tl, col: tc });
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while chars.get(j).is_some_and(|c| c.is_ascii_digit()) {
                j += 1;
            }
            if chars.get(j) == Some(&'.') && chars.get(j + 1).is_some_and(|c| c.is_ascii_digit()) {
                return Err(unsupported(tl, tc, "non-integer literal"));
            }
            let digits: String = chars[i..j].iter().collect();
            let n = digits
                .parse::<i64>()
                .map_err(|_| perr(tl, tc, format!("integer literal `{digits}` out of range")))?;
            let len = j - i;
            advance(&mut i, &mut line, &mut col, len);
            out.push(Tok { t: T::Int(n), line: tl, col: tc });
            continue;
        }
        // identifiers, possibly dotted and «escaped»
        let dot_prefix = c == '.' && chars.get(i + 1).is_some_and(|&n| is_ident_start(n) || n == '«');
        if is_ident_start(c) || c == '«' || dot_prefix {
            let mut j = if dot_prefix { i + 1 } else { i };
            let mut name = String::new();
            loop {
                if chars.get(j) == Some(&'«') {
                    let close = chars[j..]
                        .iter()
                        .position(|&c| c == '»')
                        .ok_or_else(|| perr(tl, tc, "unterminated «name»"))?;
                    name.extend(&chars[j + 1..j + close]);
                    j += close + 1;
                } else if chars.get(j).is_some_and(|&c| is_ident_start(c)) {
                    while chars.get(j).is_some_and(|&c| is_ident_continue(c)) {
                        name.push(chars[j]);
                        j += 1;
                    }
                } else {
                    return Err(perr(tl, tc, "malformed identifier"));
                }
                if chars.get(j) == Some(&'.')
                    && chars.get(j + 1).is_some_and(|&n| is_ident_start(n) || n == '«')
                {
                    name.push('.');
                    j += 1;
                } else {
                    break;
                }
            }
            let n = j - i;
            advance(&mut i, &mut line, &mut col, n);
            out.push(Tok {
                t: if dot_prefix { T::DotIdent(name) } else { T::Ident(name) },
                line: tl,
                col: tc,
            });
            continue;
        }
        match SYMBOLS.iter().find(|(s, _)| starts(i, s)) {
            Some((s, canon)) => {
                advance(&mut i, &mut line, &mut col, s.chars().count());
                out.push(Tok { t: T::Sym(canon), line: tl, col: tc });
            }
            None => return Err(perr(tl, tc, format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
enum LeanType {
    Bool,
    Prop,
    Numeric(Option<String>),
    Str,
    Inductive(String),
}

#[derive(Debug)]
enum Term {
    Var(String),
    Int(i64),
    Str(String),
    Ctor(Option<String>, String),
    BoolLit(bool),
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    inductives: BTreeMap<String, Vec<String>>,
    vars: Vec<(String, LeanType)>,
    string_values: BTreeMap<String, Vec<String>>,
    end: (usize, usize),
}

const TOP_LEVEL: &[&str] = &[
    "import", "open", "set_option", "namespace", "section", "end", "inductive", "variable", "def",
    "abbrev", "theorem", "lemma", "example", "noncomputable", "structure", "axiom", "instance",
];

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn peek_t(&self) -> Option<&T> {
        self.peek().map(|t| &t.t)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map_or(self.end, |t| (t.line, t.col))
    }

    fn error(&self, message: impl Into<String>) -> LeanError {
        let (l, c) = self.here();
        let found = match self.peek_t() {
            None => "end of input".to_string(),
            Some(T::Ident(s)) => format!("`{s}`"),
            Some(T::DotIdent(s)) => format!("`.{s}`"),
            Some(T::Int(n)) => format!("`{n}`"),
            Some(T::Str(s)) => format!("\"{s}\""),
            Some(T::Sym(s)) => format!("`{s}`"),
            Some(T::UnitComment(_)) => "a comment".to_string(),
        };
        perr(l, c, format!("{}, found {found}", message.into()))
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek_t(), Some(T::Sym(x)) if *x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.at_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), LeanError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{s}`")))
        }
    }

    fn at_ident(&self, s: &str) -> bool {
        matches!(self.peek_t(), Some(T::Ident(x)) if x == s)
    }

    fn ident(&mut self, what: &str) -> Result<String, LeanError> {
        match self.peek_t() {
            Some(T::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn skip_comments(&mut self) {
        while matches!(self.peek_t(), Some(T::UnitComment(_))) {
            self.pos += 1;
        }
    }

    fn skip_line(&mut self) {
        let line = self.peek().map(|t| t.line);
        while self.peek().map(|t| t.line) == line && line.is_some() {
            self.pos += 1;
        }
    }

    fn var_type(&self, name: &str) -> Option<&LeanType> {
        self.vars.iter().rev().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    fn file(&mut self) -> Result<Formula, LeanError> {
        let mut def: Option<Formula> = None;
        loop {
            self.skip_comments();
            let Some(tok) = self.peek().cloned() else { break };
            let (l, c) = (tok.line, tok.col);
            let T::Ident(kw) = &tok.t else {
                if let T::Sym(s @ ("∀" | "∃")) = tok.t {
                    return Err(unsupported(l, c, format!("quantifier `{s}`")));
                }
                return Err(self.error("expected a declaration"));
            };
            match kw.as_str() {
                "import" | "open" | "set_option" | "namespace" | "section" | "end" => self.skip_line(),
                "inductive" => {
                    self.pos += 1;
                    self.inductive()?
                }
                "variable" => {
                    self.pos += 1;
                    self.binders(true)?
                }
                "def" | "abbrev" => {
                    if def.is_some() {
                        return Err(unsupported(l, c, "more than one definition"));
                    }
                    self.pos += 1;
                    def = Some(self.definition()?);
                }
                "theorem" | "lemma" | "example" => return Err(unsupported(l, c, "theorem")),
                "structure" | "axiom" | "instance" | "noncomputable" | "class" => {
                    return Err(unsupported(l, c, format!("`{kw}` declaration")))
                }
                _ => return Err(self.error("expected a declaration")),
            }
        }
        def.ok_or_else(|| perr(self.end.0, self.end.1, "no `def … : Prop :=` found"))
    }

    fn inductive(&mut self) -> Result<(), LeanError> {
        let name = self.ident("an inductive type name")?;
        if self.at_ident("where") {
            self.pos += 1;
        }
        let mut ctors = Vec::new();
        while self.eat_sym("|") {
            let ctor = self.ident("a constructor name")?;
            if self.at_sym(":") || self.at_sym("(") {
                let (l, c) = self.here();
                return Err(unsupported(l, c, "constructor with arguments"));
            }
            let value = ctor_value(&ctor);
            if ctors.contains(&value) {
                return Err(self.error(format!("duplicate constructor `{ctor}`")));
            }
            ctors.push(value);
        }
        if ctors.len() < 2 {
            return Err(self.error(format!("inductive `{name}` needs at least two constructors")));
        }
        if self.at_ident("deriving") {
            self.pos += 1;
            self.ident("a class name")?;
            while self.eat_sym(",") {
                self.ident("a class name")?;
            }
        }
        self.inductives.insert(name, ctors);
        Ok(())
    }

    fn lean_type(&mut self) -> Result<LeanType, LeanError> {
        let (l, c) = self.here();
        let ty = match self.peek_t() {
            Some(T::Sym("ℤ" | "ℕ" | "ℝ")) => LeanType::Numeric(None),
            Some(T::Ident(s)) => match s.as_str() {
                "Bool" => LeanType::Bool,
                "Prop" => LeanType::Prop,
                "Int" | "Nat" | "Real" => LeanType::Numeric(None),
                "String" => LeanType::Str,
                other if self.inductives.contains_key(other) => LeanType::Inductive(other.to_string()),
                "Type" | "Sort" => return Err(unsupported(l, c, "type parameter")),
                other => return Err(self.error(format!("unknown type `{other}`"))),
            },
            _ => return Err(self.error("expected a type")),
        };
        self.pos += 1;
        if self.at_sym("→") || self.at_sym("×") {
            return Err(unsupported(l, c, "function or product type"));
        }
        Ok(ty)
    }

    /// `(a b : T)` groups. A `-- unit:` comment on the same line as a
    /// numeric group sets its unit.
    fn binders(&mut self, required: bool) -> Result<(), LeanError> {
        let mut any = false;
        loop {
            if self.at_sym("{") || self.at_sym("[") {
                let (l, c) = self.here();
                return Err(unsupported(l, c, "implicit or instance binder"));
            }
            if !self.eat_sym("(") {
                break;
            }
            any = true;
            let mut names = vec![self.ident("a variable name")?];
            while let Some(T::Ident(_)) = self.peek_t() {
                names.push(self.ident("a variable name")?);
            }
            self.expect_sym(":")?;
            let mut ty = self.lean_type()?;
            let close_line = self.here().0;
            self.expect_sym(")")?;
            if let Some(Tok { t: T::UnitComment(u), line, .. }) = self.peek() {
                if *line == close_line {
                    if let LeanType::Numeric(_) = ty {
                        ty = LeanType::Numeric(Some(u.clone()));
                    }
                    self.pos += 1;
                }
            }
            for n in names {
                if self.vars.iter().any(|(v, _)| *v == n) {
                    return Err(self.error(format!("variable `{n}` declared twice")));
                }
                self.vars.push((n, ty.clone()));
            }
        }
        if required && !any {
            return Err(self.error("expected a binder `(name : Type)`"));
        }
        Ok(())
    }

    fn definition(&mut self) -> Result<Formula, LeanError> {
        self.ident("a definition name")?;
        self.binders(false)?;
        self.expect_sym(":")?;
        let (l, c) = self.here();
        match self.peek_t() {
            Some(T::Ident(s)) if s == "Prop" => self.pos += 1,
            Some(T::Ident(s)) => return Err(unsupported(l, c, format!("definition of type `{s}`"))),
            _ => return Err(self.error("expected `Prop`")),
        }
        self.expect_sym(":=")?;
        let f = self.expr()?;
        self.skip_comments();
        match self.peek_t() {
            None => {}
            Some(T::Ident(s)) if TOP_LEVEL.contains(&s.as_str()) => {}
            Some(_) => return Err(self.error("expected end of definition")),
        }
        Ok(f)
    }

    fn expr(&mut self) -> Result<Formula, LeanError> {
        let lhs = self.implication()?;
        if self.eat_sym("↔") {
            let rhs = self.implication()?;
            if self.at_sym("↔") {
                return Err(self.error("`↔` is not associative; add parentheses"));
            }
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, LeanError> {
        let lhs = self.disjunction()?;
        if self.eat_sym("→") {
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, LeanError> {
        let lhs = self.conjunction()?;
        if self.eat_sym("∨") {
            let rhs = self.disjunction()?;
            return Ok(Formula::Or(vec![lhs, rhs]));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, LeanError> {
        let lhs = self.unary()?;
        if self.eat_sym("∧") {
            let rhs = self.conjunction()?;
            return Ok(Formula::And(vec![lhs, rhs]));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, LeanError> {
        let (l, c) = self.here();
        if self.eat_sym("¬") {
            return Ok(Formula::not(self.unary()?));
        }
        match self.peek_t() {
            Some(T::Sym(s @ ("∀" | "∃"))) => return Err(unsupported(l, c, format!("quantifier `{s}`"))),
            Some(T::Sym("λ")) => return Err(unsupported(l, c, "lambda")),
            Some(T::Ident(s)) => match s.as_str() {
                "forall" | "exists" => return Err(unsupported(l, c, format!("quantifier `{s}`"))),
                "fun" => return Err(unsupported(l, c, "lambda")),
                "if" | "match" | "let" => return Err(unsupported(l, c, format!("`{s}` expression"))),
                "True" | "False" => return Err(unsupported(l, c, format!("propositional constant `{s}`"))),
                "Not" => return Err(unsupported(l, c, "`Not` application")),
                _ => {}
            },
            _ => {}
        }
        let paren_negative = self.at_sym("(")
            && matches!(self.toks.get(self.pos + 1).map(|t| &t.t), Some(T::Sym("-")));
        if self.at_sym("(") && !paren_negative {
            self.pos += 1;
            let f = self.expr()?;
            self.expect_sym(")")?;
            if self.comparison_op().is_some() || self.arith_op() {
                let (l, c) = self.here();
                return Err(unsupported(l, c, "comparison of a parenthesized expression"));
            }
            return Ok(f);
        }
        self.comparison()
    }

    fn comparison_op(&self) -> Option<CmpOp> {
        match self.peek_t() {
            Some(T::Sym(s)) => match *s {
                "=" => Some(CmpOp::Eq),
                "≠" => Some(CmpOp::Ne),
                "<" => Some(CmpOp::Lt),
                "≤" => Some(CmpOp::Le),
                ">" => Some(CmpOp::Gt),
                "≥" => Some(CmpOp::Ge),
                _ => None,
            },
            _ => None,
        }
    }

    fn arith_op(&self) -> bool {
        matches!(self.peek_t(), Some(T::Sym("+" | "-" | "*" | "/" | "^" | "%")))
    }

    fn term(&mut self) -> Result<Term, LeanError> {
        let (l, c) = self.here();
        let t = match self.peek_t().cloned() {
            Some(T::Int(n)) => Term::Int(n),
            Some(T::Str(s)) => Term::Str(s),
            Some(T::DotIdent(s)) => Term::Ctor(None, s),
            Some(T::Sym("-")) => {
                self.pos += 1;
                match self.peek_t() {
                    Some(T::Int(n)) => Term::Int(-n),
                    _ => return Err(unsupported(l, c, "arithmetic")),
                }
            }
            Some(T::Sym("(")) => {
                self.pos += 1;
                self.expect_sym("-")?;
                let n = match self.peek_t() {
                    Some(T::Int(n)) => *n,
                    _ => return Err(unsupported(l, c, "arithmetic")),
                };
                self.pos += 1;
                self.expect_sym(")")?;
                return self.after_term(Term::Int(-n));
            }
            Some(T::Ident(s)) => match s.as_str() {
                "true" => Term::BoolLit(true),
                "false" => Term::BoolLit(false),
                _ => match s.rsplit_once('.') {
                    Some((ty, ctor)) if self.inductives.contains_key(ty) => {
                        Term::Ctor(Some(ty.to_string()), ctor.to_string())
                    }
                    Some(_) => return Err(perr(l, c, format!("unknown qualified name `{s}`"))),
                    None => Term::Var(s),
                },
            },
            _ => return Err(self.error("expected a term")),
        };
        self.pos += 1;
        self.after_term(t)
    }

    fn after_term(&mut self, t: Term) -> Result<Term, LeanError> {
        if self.arith_op() {
            let (l, c) = self.here();
            return Err(unsupported(l, c, "arithmetic"));
        }
        if let Some(T::Ident(_) | T::Int(_) | T::Str(_)) = self.peek_t() {
            if matches!(t, Term::Var(_)) {
                let (l, c) = self.here();
                return Err(unsupported(l, c, "function application"));
            }
        }
        Ok(t)
    }

    fn comparison(&mut self) -> Result<Formula, LeanError> {
        let (l, c) = self.here();
        let lhs = self.term()?;
        let Some(op) = self.comparison_op() else {
            return self.bare(lhs, l, c);
        };
        self.pos += 1;
        let rhs = self.term()?;
        if self.comparison_op().is_some() {
            return Err(self.error("chained comparison"));
        }
        // variable on the left
        let (lhs, op, rhs) = match (&lhs, &rhs) {
            (Term::Var(_), _) => (lhs, op, rhs),
            (_, Term::Var(_)) => (rhs, op.flip(), lhs),
            _ => return Err(perr(l, c, "comparison without a variable")),
        };
        let Term::Var(var) = lhs else { unreachable!() };
        let ty = self
            .var_type(&var)
            .cloned()
            .ok_or_else(|| perr(l, c, format!("undeclared variable `{var}`")))?;
        let eq_only = |op: CmpOp, what: &str| -> Result<bool, LeanError> {
            match op {
                CmpOp::Eq => Ok(true),
                CmpOp::Ne => Ok(false),
                _ => Err(perr(l, c, format!("ordering comparison on {what} `{var}`"))),
            }
        };
        match (ty, rhs) {
            (LeanType::Bool, Term::BoolLit(b)) => {
                let positive = eq_only(op, "boolean")? == b;
                let atom = Formula::bool_var(&var);
                Ok(if positive { atom } else { Formula::not(atom) })
            }
            (LeanType::Bool | LeanType::Prop, Term::Var(other))
                if matches!(self.var_type(&other), Some(LeanType::Bool | LeanType::Prop)) =>
            {
                let iff = Formula::iff(Formula::bool_var(&var), Formula::bool_var(&other));
                Ok(if eq_only(op, "boolean")? { iff } else { Formula::not(iff) })
            }
            (LeanType::Numeric(_), Term::Int(n)) => Ok(Formula::cmp_const(&var, op, n)),
            (LeanType::Numeric(_), Term::Var(other)) => match self.var_type(&other) {
                Some(LeanType::Numeric(_)) => Ok(Formula::cmp_var(&var, op, &other)),
                Some(_) => Err(perr(l, c, format!("`{other}` is not numeric"))),
                None => Err(perr(l, c, format!("undeclared variable `{other}`"))),
            },
            (LeanType::Inductive(ty), Term::Ctor(qual, ctor)) => {
                if qual.as_ref().is_some_and(|q| *q != ty) {
                    return Err(perr(l, c, format!("constructor of another type compared with `{var}`")));
                }
                let value = ctor_value(&ctor);
                if !self.inductives[&ty].contains(&value) {
                    return Err(perr(l, c, format!("`{ctor}` is not a constructor of `{ty}`")));
                }
                let atom = Formula::enum_eq(&var, &value);
                Ok(if eq_only(op, "enum")? { atom } else { Formula::not(atom) })
            }
            (LeanType::Inductive(ty), Term::Var(ctor))
                if self.inductives[&ty].contains(&ctor_value(&ctor)) =>
            {
                let atom = Formula::enum_eq(&var, &ctor_value(&ctor));
                Ok(if eq_only(op, "enum")? { atom } else { Formula::not(atom) })
            }
            (LeanType::Str, Term::Str(s)) => {
                let value = snake_case(&s)
                    .ok_or_else(|| perr(l, c, format!("string literal \"{s}\" has no usable name")))?;
                let values = self.string_values.entry(var.clone()).or_default();
                if !values.contains(&value) {
                    values.push(value.clone());
                }
                let atom = Formula::enum_eq(&var, &value);
                Ok(if eq_only(op, "string")? { atom } else { Formula::not(atom) })
            }
            (ty, _) => Err(perr(l, c, format!("ill-typed comparison on `{var}` ({ty:?})"))),
        }
    }

    fn bare(&mut self, t: Term, l: usize, c: usize) -> Result<Formula, LeanError> {
        match t {
            Term::Var(v) => match self.var_type(&v) {
                Some(LeanType::Bool | LeanType::Prop) => Ok(Formula::bool_var(&v)),
                Some(_) => Err(perr(l, c, format!("`{v}` is not a proposition"))),
                None => Err(perr(l, c, format!("undeclared variable `{v}`"))),
            },
            _ => Err(perr(l, c, "expected a proposition")),
        }
    }

    fn signature(&self) -> Result<Signature, LeanError> {
        let mut sig = Signature::new();
        for (name, ty) in &self.vars {
            let sort = match ty {
                LeanType::Bool | LeanType::Prop => Sort::Bool,
                LeanType::Numeric(None) => Sort::numeric(),
                LeanType::Numeric(Some(u)) => Sort::numeric_with_unit(u.clone()),
                LeanType::Inductive(t) => Sort::enumeration(self.inductives[t].iter().cloned())?,
                LeanType::Str => {
                    let mut values = self.string_values.get(name).cloned().unwrap_or_default();
                    while values.len() < 2 {
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
        }
        Ok(sig)
    }
}

/// Parses a Lean file holding one `def … : Prop`. Returns the normalized
/// formula and the declared variables.
pub fn parse_lean_def(text: &str) -> Result<(Formula, Signature), LeanError> {
    let toks = lex(text)?;
    let end = toks.last().map_or((1, 1), |t| (t.line, t.col));
    let mut p = Parser {
        toks,
        pos: 0,
        inductives: BTreeMap::new(),
        vars: Vec::new(),
        string_values: BTreeMap::new(),
        end,
    };
    let f = p.file()?;
    let sig = p.signature()?;
    f.check(&sig)?;
    Ok((normalize(&f), sig))
}
