//! Gherkin subset: `Feature`, `Scenario`, `Scenario Outline` (or
//! `Scenario Template`), `Given`/`When`/`Then` with `And`/`But`/`*`
//! continuations, and `Examples` tables. Tags, `Background`, `Rule`,
//! docstrings and step data tables are rejected.
//!
//! Each scenario compiles to the conjunction over its Examples rows of
//! `(given ∧ when) → then`.

use std::collections::{BTreeMap, BTreeSet};

use super::phrase::{
    lower_action, lower_conditions, subject_name, tokenize, Action, CondTree, LowerCtx,
    PhraseParser, Predicate, Term, ValueTerm,
};
use super::{FrontendError, Location, SortCollector};
use crate::ir::{Formula, Signature};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    /// Keyword as written (`Given`, `And`, `*`, ...).
    pub keyword: String,
    pub text: String,
    pub line: usize,
    /// Column where `text` starts.
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Examples {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GherkinScenario {
    pub title: String,
    pub file: String,
    pub line: usize,
    pub given_steps: Vec<Step>,
    pub when_steps: Vec<Step>,
    pub then_steps: Vec<Step>,
    /// `None` for a plain scenario: one implicit empty row.
    pub examples: Option<Examples>,
}

impl GherkinScenario {
    /// Rows as placeholder → cell maps.
    pub fn rows(&self) -> Vec<BTreeMap<String, String>> {
        match &self.examples {
            None => vec![BTreeMap::new()],
            Some(ex) => ex
                .rows
                .iter()
                .map(|r| ex.header.iter().cloned().zip(r.iter().cloned()).collect())
                .collect(),
        }
    }

    pub fn steps(&self) -> impl Iterator<Item = &Step> {
        self.given_steps
            .iter()
            .chain(&self.when_steps)
            .chain(&self.then_steps)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Group {
    Given,
    When,
    Then,
}

fn perr(line: usize, column: usize, expected: &str, found: &str) -> FrontendError {
    FrontendError::Parse {
        at: Location::LineCol { line, column },
        expected: expected.into(),
        found: found.into(),
    }
}

/// Placeholder names in step text, in order of appearance.
fn placeholders(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find('<') {
        let after = &rest[open + 1..];
        match after.find('>') {
            Some(close) if !after[..close].trim().is_empty() && !after[..close].contains('<') => {
                out.push(after[..close].trim().to_string());
                rest = &after[close + 1..];
            }
            _ => rest = after,
        }
    }
    out
}

fn table_cells(line: &str) -> Option<Vec<String>> {
    let inner = line.strip_prefix('|')?.strip_suffix('|')?;
    Some(inner.split('|').map(|c| c.trim().to_string()).collect())
}

pub fn parse_feature(text: &str) -> Result<Vec<GherkinScenario>, FrontendError> {
    parse_feature_in(text, "<inline>")
}

/// Like [`parse_feature`], recording `file` for provenance.
pub fn parse_feature_in(text: &str, file: &str) -> Result<Vec<GherkinScenario>, FrontendError> {
    let mut scenarios: Vec<GherkinScenario> = Vec::new();
    let mut current: Option<GherkinScenario> = None;
    let mut group: Option<Group> = None;
    let mut in_examples = false;
    let mut seen_feature = false;
    let mut earlier_headers: Vec<Vec<String>> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let indent = raw.chars().take_while(|c| c.is_whitespace()).count();
        let col = indent + 1;

        if trimmed.starts_with('@') {
            return Err(perr(line_no, col, "a keyword", "a tag (tags are not supported)"));
        }
        if trimmed.starts_with("\"\"\"") || trimmed.starts_with("```") {
            return Err(perr(line_no, col, "a keyword", "a docstring (not supported)"));
        }

        if let Some(cells) = trimmed.starts_with('|').then(|| table_cells(trimmed)) {
            let Some(cells) = cells else {
                return Err(perr(line_no, col + trimmed.chars().count(), "closing `|`", "end of line"));
            };
            let Some(sc) = current.as_mut().filter(|_| in_examples) else {
                return Err(perr(line_no, col, "a step", "a table outside Examples (not supported)"));
            };
            let ex = sc.examples.get_or_insert_with(Examples::default);
            if ex.header.is_empty() {
                if let Some(pos) = cells.iter().position(String::is_empty) {
                    return Err(perr(line_no, col, "a column name", &format!("empty header cell {}", pos + 1)));
                }
                ex.header = cells;
            } else if cells.len() != ex.header.len() {
                return Err(FrontendError::TableShape {
                    line: line_no,
                    expected: ex.header.len(),
                    found: cells.len(),
                });
            } else {
                ex.rows.push(cells);
            }
            continue;
        }

        let (keyword, rest) = match trimmed.split_once(':') {
            Some((k, r)) if is_block_keyword(k.trim()) => (k.trim(), Some(r.trim())),
            _ => (trimmed, None),
        };
        if let Some(title) = rest {
            match keyword {
                "Feature" => {
                    if seen_feature {
                        return Err(perr(line_no, col, "a scenario", "a second `Feature:`"));
                    }
                    seen_feature = true;
                }
                "Background" | "Rule" => {
                    return Err(perr(line_no, col, "`Scenario:`", &format!("`{keyword}:` (not supported)")));
                }
                "Examples" | "Scenarios" => {
                    let Some(sc) = current.as_mut() else {
                        return Err(perr(line_no, col, "`Scenario:`", "`Examples:`"));
                    };
                    if let Some(ex) = sc.examples.as_mut() {
                        // A further block starts with its own header line.
                        earlier_headers.push(std::mem::take(&mut ex.header));
                    }
                    in_examples = true;
                }
                _ => {
                    if let Some(done) = current.take() {
                        scenarios.push(finish(done, &mut earlier_headers)?);
                    }
                    current = Some(GherkinScenario {
                        title: title.to_string(),
                        file: file.to_string(),
                        line: line_no,
                        given_steps: Vec::new(),
                        when_steps: Vec::new(),
                        then_steps: Vec::new(),
                        examples: None,
                    });
                    group = None;
                    in_examples = false;
                }
            }
            continue;
        }

        let step_kw = ["Given", "When", "Then", "And", "But", "*"]
            .into_iter()
            .find(|k| {
                trimmed
                    .strip_prefix(k)
                    .is_some_and(|r| r.starts_with(char::is_whitespace))
            });
        match step_kw {
            Some(kw) => {
                let Some(sc) = current.as_mut() else {
                    return Err(perr(line_no, col, "`Scenario:`", &format!("`{kw}` step")));
                };
                if in_examples {
                    return Err(perr(line_no, col, "a table row", &format!("`{kw}` step after Examples")));
                }
                let next = match kw {
                    "Given" => Group::Given,
                    "When" => Group::When,
                    "Then" => Group::Then,
                    _ => group.ok_or_else(|| {
                        perr(line_no, col, "`Given`, `When` or `Then`", &format!("`{kw}`"))
                    })?,
                };
                group = Some(next);
                let after_kw = &trimmed[kw.len()..];
                let text_col = col + kw.chars().count() + (after_kw.chars().count() - after_kw.trim_start().chars().count());
                let step = Step {
                    keyword: kw.to_string(),
                    text: after_kw.trim().to_string(),
                    line: line_no,
                    column: text_col,
                };
                match next {
                    Group::Given => sc.given_steps.push(step),
                    Group::When => sc.when_steps.push(step),
                    Group::Then => sc.then_steps.push(step),
                }
            }
            None => {
                // Free description text is allowed right after a header.
                let describing = match &current {
                    None => true,
                    Some(sc) => sc.steps().next().is_none() && !in_examples,
                };
                if !describing {
                    return Err(perr(line_no, col, "a step keyword", &format!("`{trimmed}`")));
                }
            }
        }
    }
    if let Some(done) = current.take() {
        scenarios.push(finish(done, &mut earlier_headers)?);
    }
    if scenarios.is_empty() {
        return Err(perr(text.lines().count().max(1), 1, "a scenario", "end of input"));
    }
    Ok(scenarios)
}

fn is_block_keyword(k: &str) -> bool {
    matches!(
        k,
        "Feature"
            | "Background"
            | "Rule"
            | "Scenario"
            | "Example"
            | "Scenario Outline"
            | "Scenario Template"
            | "Examples"
            | "Scenarios"
    )
}

/// Validates a completed scenario. `earlier_headers` holds the headers of
/// previous Examples blocks, which must match the last one.
fn finish(
    sc: GherkinScenario,
    earlier_headers: &mut Vec<Vec<String>>,
) -> Result<GherkinScenario, FrontendError> {
    let earlier = std::mem::take(earlier_headers);
    if let Some(ex) = &sc.examples {
        for header in &earlier {
            if !ex.header.is_empty() && header != &ex.header {
                return Err(perr(sc.line, 1, "matching Examples headers", "differing headers"));
            }
        }
    }
    if sc.then_steps.is_empty() {
        return Err(perr(sc.line, 1, "at least one `Then` step", "none"));
    }
    let header: BTreeSet<&str> = sc
        .examples
        .iter()
        .flat_map(|e| e.header.iter().map(String::as_str))
        .collect();
    for step in sc.steps() {
        for p in placeholders(&step.text) {
            if !header.contains(p.as_str()) {
                return Err(FrontendError::UnboundPlaceholder {
                    name: p,
                    line: step.line,
                });
            }
        }
    }
    if let Some(ex) = &sc.examples {
        if ex.header.is_empty() || ex.rows.is_empty() {
            return Err(perr(sc.line, 1, "an Examples table with at least one row", "an empty table"));
        }
    }
    Ok(sc)
}

enum Parsed {
    Conds(CondTree),
    Action(Action),
}

fn parse_step(step: &Step, then: bool) -> Result<Parsed, FrontendError> {
    let relocate = |e: FrontendError| e.relocate(step.line, step.column, &step.text);
    let tokens = tokenize(&step.text, true).map_err(relocate)?;
    let text_len = step.text.len();
    if then {
        let mut p = PhraseParser::new(&tokens, text_len);
        if let Ok(action) = p.action() {
            p.finish_sentence();
            if p.is_done() {
                return Ok(Parsed::Action(action));
            }
        }
    }
    let mut p = PhraseParser::new(&tokens, text_len);
    let conds = p.conditions().map_err(relocate)?;
    p.finish_sentence();
    if !p.is_done() {
        return Err(relocate(p.unsupported_rest(&step.text)));
    }
    Ok(Parsed::Conds(conds))
}

/// Subjects given a literal state in Given steps and a literal new state in
/// When steps. These get `initial_`/`final_` variables.
fn split_subjects(given: &[(Parsed, &Step)], when: &[(Parsed, &Step)]) -> BTreeSet<String> {
    let empty_row = BTreeMap::new();
    let no_renames = BTreeMap::new();
    let ctx = LowerCtx {
        row: &empty_row,
        slot_names_variable: true,
        renames: &no_renames,
        file: "",
        line: 0,
    };
    let literal = |v: &ValueTerm| !matches!(v, ValueTerm::Placeholder(_));
    let collect = |steps: &[(Parsed, &Step)], want_change: bool| -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for (parsed, _) in steps {
            let Parsed::Conds(tree) = parsed else { continue };
            for leaf in tree.leaves() {
                let hit = match &leaf.predicate {
                    Predicate::Is { value, .. } => !want_change && literal(value),
                    Predicate::ChangesTo(value) => want_change && literal(value),
                    Predicate::Compare { .. } => false,
                };
                if hit && matches!(leaf.subject, Term::Phrase { .. }) {
                    if let Ok(name) = subject_name(&leaf.subject, &ctx) {
                        out.insert(name);
                    }
                }
            }
        }
        out
    };
    let initial = collect(given, false);
    let changed = collect(when, true);
    initial.intersection(&changed).cloned().collect()
}

fn compile_into(
    s: &GherkinScenario,
    sorts: &mut SortCollector,
) -> Result<Formula, FrontendError> {
    fn parse_all(steps: &[Step], then: bool) -> Result<Vec<(Parsed, &Step)>, FrontendError> {
        steps
            .iter()
            .map(|st| parse_step(st, then).map(|p| (p, st)))
            .collect()
    }
    let given = parse_all(&s.given_steps, false)?;
    let when = parse_all(&s.when_steps, false)?;
    let then = parse_all(&s.then_steps, true)?;

    let split = split_subjects(&given, &when);
    let given_renames: BTreeMap<String, String> =
        split.iter().map(|n| (n.clone(), format!("initial_{n}"))).collect();
    let when_renames: BTreeMap<String, String> =
        split.iter().map(|n| (n.clone(), format!("final_{n}"))).collect();
    let no_renames = BTreeMap::new();

    let mut row_formulas = Vec::new();
    for row in s.rows() {
        let lower = |steps: &[(Parsed, &Step)],
                     slots: bool,
                     renames: &BTreeMap<String, String>,
                     sorts: &mut SortCollector|
         -> Result<Vec<Formula>, FrontendError> {
            steps
                .iter()
                .map(|(parsed, step)| {
                    let ctx = LowerCtx {
                        row: &row,
                        slot_names_variable: slots,
                        renames,
                        file: &s.file,
                        line: step.line,
                    };
                    match parsed {
                        Parsed::Conds(tree) => lower_conditions(tree, &ctx, sorts),
                        Parsed::Action(a) => lower_action(a, &ctx, sorts),
                    }
                    .map_err(|e| e.relocate(step.line, step.column, &step.text))
                })
                .collect()
        };
        let mut antecedent = lower(&given, true, &given_renames, sorts)?;
        antecedent.extend(lower(&when, true, &when_renames, sorts)?);
        let consequent = Formula::and(lower(&then, false, &no_renames, sorts)?);
        row_formulas.push(if antecedent.is_empty() {
            consequent
        } else {
            Formula::implies(Formula::and(antecedent), consequent)
        });
    }
    Ok(Formula::and(row_formulas))
}

pub fn compile_scenario(s: &GherkinScenario) -> Result<(Formula, Signature), FrontendError> {
    let mut sorts = SortCollector::default();
    let f = compile_into(s, &mut sorts)?;
    Ok((f, sorts.finish()?))
}

/// Conjunction of all scenarios, over one shared signature.
pub fn compile_feature(scenarios: &[GherkinScenario]) -> Result<(Formula, Signature), FrontendError> {
    let mut sorts = SortCollector::default();
    let fs = scenarios
        .iter()
        .map(|s| compile_into(s, &mut sorts))
        .collect::<Result<Vec<_>, _>>()?;
    if fs.is_empty() {
        return Err(perr(1, 1, "a scenario", "none"));
    }
    Ok((Formula::and(fs), sorts.finish()?))
}
