//! Controlled requirement sentences:
//!
//! ```text
//! req := ("If" | "When" | "Given") conditions [","] "then" action ["."]
//! ```
//!
//! A requirement lowers to `conditions → action`.

use std::collections::BTreeMap;

use super::phrase::{lower_action, lower_conditions, tokenize, LowerCtx, PhraseParser};
use super::{FrontendError, Location, SortCollector};
use crate::ir::{Formula, Signature, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequirementDoc {
    pub id: String,
    pub text: String,
    pub span: SourceSpan,
}

impl RequirementDoc {
    pub fn new(id: &str, text: &str) -> Self {
        RequirementDoc {
            id: id.to_string(),
            text: text.to_string(),
            span: SourceSpan {
                file: "<inline>".into(),
                line: 1,
                original: text.to_string(),
            },
        }
    }
}

pub fn parse_requirement(doc: &RequirementDoc) -> Result<(Formula, Signature), FrontendError> {
    let text = doc.text.as_str();
    if text.trim().is_empty() {
        return Err(FrontendError::Parse {
            at: Location::Offset(0),
            expected: "a requirement sentence".into(),
            found: "empty text".into(),
        });
    }
    let tokens = tokenize(text, false)?;
    let mut p = PhraseParser::new(&tokens, text.len());
    if !(p.eat_word("if") || p.eat_word("when") || p.eat_word("given")) {
        return Err(p.error("`If`, `When` or `Given`"));
    }
    let conditions = p.conditions()?;
    p.eat_comma();
    if !p.eat_word("then") {
        return Err(p.error("`then`"));
    }
    let action = p.action()?;
    p.finish_sentence();
    if !p.is_done() {
        return Err(p.unsupported_rest(text));
    }

    let row = BTreeMap::new();
    let renames = BTreeMap::new();
    let ctx = LowerCtx {
        row: &row,
        slot_names_variable: false,
        renames: &renames,
        file: &doc.span.file,
        line: doc.span.line,
    };
    let mut sorts = SortCollector::default();
    let antecedent = lower_conditions(&conditions, &ctx, &mut sorts)?;
    let consequent = lower_action(&action, &ctx, &mut sorts)?;
    let sig = sorts.finish()?;
    Ok((Formula::implies(antecedent, consequent), sig))
}

/// Splits a requirement file into documents.
///
/// Two layouts are accepted: a bare sentence (the whole file, id taken from
/// `default_id`), or blocks of `id: <ident>` / `text: <sentence>` lines
/// separated by blank lines. A `text:` value may continue on following
/// lines of the same block.
pub fn parse_requirement_file(
    content: &str,
    file: &str,
    default_id: &str,
) -> Result<Vec<RequirementDoc>, FrontendError> {
    let first = content
        .lines()
        .enumerate()
        .find(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let Some((first_idx, first_line)) = first else {
        return Err(FrontendError::Parse {
            at: Location::LineCol { line: 1, column: 1 },
            expected: "a requirement".into(),
            found: "empty file".into(),
        });
    };
    if !first_line.trim_start().starts_with("id:") {
        let text = content
            .lines()
            .filter(|l| !l.trim_start().starts_with('#'))
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect::<Vec<_>>()
            .join(" ");
        return Ok(vec![RequirementDoc {
            id: default_id.to_string(),
            span: SourceSpan {
                file: file.to_string(),
                line: first_idx + 1,
                original: text.clone(),
            },
            text,
        }]);
    }

    let mut docs = Vec::new();
    let mut id: Option<(String, usize)> = None;
    let mut text: Option<String> = None;
    let mut flush = |id: &mut Option<(String, usize)>, text: &mut Option<String>, line: usize| {
        match (id.take(), text.take()) {
            (None, None) => Ok(()),
            (Some((id, at)), Some(text)) => {
                docs.push(RequirementDoc {
                    id,
                    span: SourceSpan {
                        file: file.to_string(),
                        line: at,
                        original: text.clone(),
                    },
                    text,
                });
                Ok(())
            }
            (Some(_), None) => Err(FrontendError::Parse {
                at: Location::LineCol { line, column: 1 },
                expected: "`text:` line".into(),
                found: "end of block".into(),
            }),
            (None, Some(_)) => Err(FrontendError::Parse {
                at: Location::LineCol { line, column: 1 },
                expected: "`id:` line".into(),
                found: "end of block".into(),
            }),
        }
    };
    for (idx, raw) in content.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            flush(&mut id, &mut text, line_no)?;
        } else if let Some(rest) = line.strip_prefix("id:") {
            flush(&mut id, &mut text, line_no)?;
            id = Some((rest.trim().to_string(), line_no));
        } else if let Some(rest) = line.strip_prefix("text:") {
            text = Some(rest.trim().to_string());
        } else if let Some(t) = text.as_mut() {
            t.push(' ');
            t.push_str(line);
        } else {
            return Err(FrontendError::Parse {
                at: Location::LineCol {
                    line: line_no,
                    column: 1,
                },
                expected: "`id:` or `text:`".into(),
                found: format!("`{line}`"),
            });
        }
    }
    flush(&mut id, &mut text, content.lines().count() + 1)?;
    Ok(docs)
}
