//! Tokenizer and phrase grammar shared by requirement sentences and Gherkin
//! steps.
//!
//! ```text
//! conditions := conj (("OR" | "," "or") conj)*
//! conj       := cond (("AND" | "," ["and" | "when" | "given"]) cond)*
//! cond       := subject predicate
//! predicate  := cmp-op operand
//!             | "is" ["not"] ( comparison operand | value )
//!             | "changes" "to" value
//! comparison := "greater than" ["or equal to"] | "less than" ["or equal to"]
//!             | "more than" | "at least" | "at most" | "equal to" | "above" | "below"
//! action     := ("initiate" | "activate") noun-phrase
//!             | subject ("shall be set to" | "shall be" | "is set to") value
//! operand    := integer | ["CALIBRATABLE"] noun-phrase | <placeholder>
//! ```
//!
//! Noun phrases drop a leading determiner (`the`, `a`, `an`) and become
//! snake-case variable names.

use std::collections::BTreeMap;

use super::{FrontendError, Location, SortCollector};
use crate::ir::{snake_case, CmpOp, Formula, SourceSpan};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Word(String),
    Number(i64),
    Quoted(String),
    Op(CmpOp),
    Comma,
    Period,
    Placeholder(String),
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub start: usize,
}

impl Token {
    fn is_word(&self, w: &str) -> bool {
        matches!(&self.tok, Tok::Word(x) if x.eq_ignore_ascii_case(w))
    }
}

fn describe(tok: Option<&Token>) -> String {
    match tok.map(|t| &t.tok) {
        None => "end of input".into(),
        Some(Tok::Word(w)) => format!("`{w}`"),
        Some(Tok::Number(n)) => format!("`{n}`"),
        Some(Tok::Quoted(q)) => format!("\"{q}\""),
        Some(Tok::Op(op)) => format!("`{op}`"),
        Some(Tok::Comma) => "`,`".into(),
        Some(Tok::Period) => "`.`".into(),
        Some(Tok::Placeholder(p)) => format!("`<{p}>`"),
    }
}

pub(crate) fn tokenize(text: &str, placeholders: bool) -> Result<Vec<Token>, FrontendError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (start, c) = chars[i];
        let next = chars.get(i + 1).map(|(_, c)| *c);
        let push = |tok: Tok, len: usize, out: &mut Vec<Token>| {
            out.push(Token { tok, start });
            len
        };
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let consumed = match c {
            ',' => push(Tok::Comma, 1, &mut out),
            '.' => push(Tok::Period, 1, &mut out),
            '≥' => push(Tok::Op(CmpOp::Ge), 1, &mut out),
            '≤' => push(Tok::Op(CmpOp::Le), 1, &mut out),
            '≠' => push(Tok::Op(CmpOp::Ne), 1, &mut out),
            '>' | '<' | '=' | '!' => {
                if c == '<' && placeholders {
                    if let Some(len) = chars[i + 1..].iter().position(|(_, c)| *c == '>') {
                        let name: String = chars[i + 1..i + 1 + len].iter().map(|(_, c)| c).collect();
                        if !name.trim().is_empty() && !name.contains('<') {
                            i += push(Tok::Placeholder(name.trim().to_string()), len + 2, &mut out);
                            continue;
                        }
                    }
                }
                let two: String = [Some(c), next].iter().flatten().collect();
                if let Some(op) = CmpOp::from_symbol(&two).filter(|_| two.chars().count() == 2) {
                    push(Tok::Op(op), 2, &mut out)
                } else if let Some(op) = CmpOp::from_symbol(&c.to_string()) {
                    push(Tok::Op(op), 1, &mut out)
                } else {
                    return Err(FrontendError::Parse {
                        at: Location::Offset(start),
                        expected: "a comparison operator".into(),
                        found: format!("`{c}`"),
                    });
                }
            }
            '"' | '“' | '”' => {
                let close = chars[i + 1..]
                    .iter()
                    .position(|(_, c)| matches!(c, '"' | '”' | '“'))
                    .ok_or_else(|| FrontendError::Parse {
                        at: Location::Offset(start),
                        expected: "closing quote".into(),
                        found: "end of input".into(),
                    })?;
                let inner: String = chars[i + 1..i + 1 + close].iter().map(|(_, c)| c).collect();
                push(Tok::Quoted(inner), close + 2, &mut out)
            }
            c if c.is_alphanumeric() || c == '_' || (c == '-' && next.is_some_and(|n| n.is_ascii_digit())) => {
                let mut j = i + 1;
                while j < chars.len() {
                    let d = chars[j].1;
                    let hyphen = d == '-' && chars.get(j + 1).is_some_and(|(_, n)| n.is_alphanumeric());
                    if d.is_alphanumeric() || d == '_' || d == '\'' || d == '/' || hyphen {
                        j += 1;
                    } else {
                        break;
                    }
                }
                let word: String = chars[i..j].iter().map(|(_, c)| c).collect();
                if let Ok(n) = word.parse::<i64>() {
                    push(Tok::Number(n), j - i, &mut out)
                } else if word.starts_with(|c: char| c.is_ascii_digit() || c == '-')
                    && j < chars.len()
                    && chars[j].1 == '.'
                    && chars.get(j + 1).is_some_and(|(_, n)| n.is_ascii_digit())
                {
                    return Err(FrontendError::UnsupportedPhrase {
                        at: Location::Offset(start),
                        span: "non-integer number".into(),
                    });
                } else {
                    push(Tok::Word(word), j - i, &mut out)
                }
            }
            other => {
                return Err(FrontendError::Parse {
                    at: Location::Offset(start),
                    expected: "a word, number or operator".into(),
                    found: format!("`{other}`"),
                })
            }
        };
        i += consumed;
    }
    Ok(out)
}

/// A noun phrase, a number, or a placeholder slot.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Term {
    Phrase {
        words: Vec<String>,
        calibratable: bool,
        start: usize,
    },
    Number(i64),
    Placeholder(String),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum ValueTerm {
    Words(Vec<String>),
    Number(i64),
    Placeholder(String),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Predicate {
    Compare { op: CmpOp, negated: bool, rhs: Term },
    Is { negated: bool, value: ValueTerm },
    ChangesTo(ValueTerm),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Condition {
    pub subject: Term,
    pub predicate: Predicate,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum CondTree {
    Leaf(Condition),
    And(Vec<CondTree>),
    Or(Vec<CondTree>),
}

impl CondTree {
    pub(crate) fn leaves(&self) -> Vec<&Condition> {
        match self {
            CondTree::Leaf(c) => vec![c],
            CondTree::And(cs) | CondTree::Or(cs) => cs.iter().flat_map(|c| c.leaves()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Action {
    Initiate(Term),
    SetTo { subject: Term, value: ValueTerm },
}

const DETERMINERS: [&str; 3] = ["the", "a", "an"];
const SUBJECT_STOPS: [&str; 6] = ["is", "are", "changes", "change", "equals", "shall"];
const CONNECTIVES: [&str; 3] = ["and", "or", "then"];

pub(crate) struct PhraseParser<'a> {
    tokens: &'a [Token],
    pos: usize,
    text_len: usize,
}

impl<'a> PhraseParser<'a> {
    pub(crate) fn new(tokens: &'a [Token], text_len: usize) -> Self {
        PhraseParser {
            tokens,
            pos: 0,
            text_len,
        }
    }

    pub(crate) fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, k: usize) -> Option<&'a Token> {
        self.tokens.get(self.pos + k)
    }

    pub(crate) fn at_word(&self, w: &str) -> bool {
        self.peek().is_some_and(|t| t.is_word(w))
    }

    fn at_words(&self, ws: &[&str]) -> bool {
        ws.iter()
            .enumerate()
            .all(|(k, w)| self.peek_at(k).is_some_and(|t| t.is_word(w)))
    }

    pub(crate) fn eat_word(&mut self, w: &str) -> bool {
        if self.at_word(w) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_words(&mut self, ws: &[&str]) -> bool {
        if self.at_words(ws) {
            self.pos += ws.len();
            true
        } else {
            false
        }
    }

    pub(crate) fn offset(&self) -> usize {
        self.peek().map_or(self.text_len, |t| t.start)
    }

    pub(crate) fn is_done(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub(crate) fn error(&self, expected: &str) -> FrontendError {
        FrontendError::Parse {
            at: Location::Offset(self.offset()),
            expected: expected.into(),
            found: describe(self.peek()),
        }
    }

    /// Errors with the unparsed remainder of the phrase.
    pub(crate) fn unsupported_rest(&self, text: &str) -> FrontendError {
        let start = self.offset();
        FrontendError::UnsupportedPhrase {
            at: Location::Offset(start),
            span: text[start.min(text.len())..].trim().to_string(),
        }
    }

    fn at_boundary(&self) -> bool {
        match self.peek().map(|t| &t.tok) {
            None | Some(Tok::Comma) | Some(Tok::Period) => true,
            Some(Tok::Word(w)) => CONNECTIVES.iter().any(|c| w.eq_ignore_ascii_case(c)),
            _ => false,
        }
    }

    pub(crate) fn conditions(&mut self) -> Result<CondTree, FrontendError> {
        let mut disjuncts = vec![self.conjunction()?];
        loop {
            if self.eat_word("or") {
            } else if matches!(self.peek().map(|t| &t.tok), Some(Tok::Comma))
                && self.peek_at(1).is_some_and(|t| t.is_word("or"))
            {
                self.pos += 2;
            } else {
                break;
            }
            disjuncts.push(self.conjunction()?);
        }
        Ok(if disjuncts.len() == 1 {
            disjuncts.pop().unwrap()
        } else {
            CondTree::Or(disjuncts)
        })
    }

    fn conjunction(&mut self) -> Result<CondTree, FrontendError> {
        let mut conjuncts = vec![CondTree::Leaf(self.condition()?)];
        loop {
            if self.eat_word("and") {
            } else if matches!(self.peek().map(|t| &t.tok), Some(Tok::Comma)) {
                let after = self.peek_at(1);
                if after.is_some_and(|t| t.is_word("then") || t.is_word("or")) {
                    break;
                }
                self.pos += 1;
                let _ = self.eat_word("and") || self.eat_word("when") || self.eat_word("given");
            } else {
                break;
            }
            conjuncts.push(CondTree::Leaf(self.condition()?));
        }
        Ok(if conjuncts.len() == 1 {
            conjuncts.pop().unwrap()
        } else {
            CondTree::And(conjuncts)
        })
    }

    pub(crate) fn condition(&mut self) -> Result<Condition, FrontendError> {
        let subject = self.subject()?;
        let predicate = self.predicate()?;
        Ok(Condition { subject, predicate })
    }

    fn subject(&mut self) -> Result<Term, FrontendError> {
        if let Some(Token {
            tok: Tok::Placeholder(p),
            ..
        }) = self.peek()
        {
            self.pos += 1;
            return Ok(Term::Placeholder(p.clone()));
        }
        self.noun_phrase(&SUBJECT_STOPS, "a noun phrase")
    }

    /// Words up to a stop word, connective or non-word token.
    fn noun_phrase(&mut self, stops: &[&str], expected: &str) -> Result<Term, FrontendError> {
        // A determiner is kept when it is the whole phrase (`a is on`).
        while DETERMINERS.iter().any(|d| self.at_word(d))
            && self.peek_at(1).is_some_and(|t| match &t.tok {
                Tok::Word(w) => {
                    let w = w.to_ascii_lowercase();
                    !stops.contains(&w.as_str()) && !CONNECTIVES.contains(&w.as_str())
                }
                _ => false,
            })
        {
            self.pos += 1;
        }
        let start = self.offset();
        let calibratable = self.eat_word("calibratable");
        let mut words = Vec::new();
        while let Some(Token {
            tok: Tok::Word(w), ..
        }) = self.peek()
        {
            let lower = w.to_ascii_lowercase();
            if stops.contains(&lower.as_str()) || CONNECTIVES.contains(&lower.as_str()) {
                break;
            }
            words.push(w.clone());
            self.pos += 1;
        }
        if words.is_empty() {
            return Err(self.error(expected));
        }
        Ok(Term::Phrase {
            words,
            calibratable,
            start,
        })
    }

    fn predicate(&mut self) -> Result<Predicate, FrontendError> {
        if let Some(Token {
            tok: Tok::Op(op), ..
        }) = self.peek()
        {
            self.pos += 1;
            let rhs = self.operand()?;
            return Ok(Predicate::Compare {
                op: *op,
                negated: false,
                rhs,
            });
        }
        if self.eat_word("equals") {
            let rhs = self.operand()?;
            return Ok(Predicate::Compare {
                op: CmpOp::Eq,
                negated: false,
                rhs,
            });
        }
        if self.eat_word("changes") || self.eat_word("change") {
            if !self.eat_word("to") {
                return Err(self.error("`to` after `changes`"));
            }
            return Ok(Predicate::ChangesTo(self.value()?));
        }
        if self.eat_word("is") || self.eat_word("are") {
            let negated = self.eat_word("not");
            if let Some(op) = self.comparison_words() {
                let rhs = self.operand()?;
                return Ok(Predicate::Compare { op, negated, rhs });
            }
            return Ok(Predicate::Is {
                negated,
                value: self.value()?,
            });
        }
        Err(self.error("`is`, `changes to` or a comparison"))
    }

    fn comparison_words(&mut self) -> Option<CmpOp> {
        let op = if self.eat_words(&["greater", "than", "or", "equal", "to"]) {
            CmpOp::Ge
        } else if self.eat_words(&["less", "than", "or", "equal", "to"]) {
            CmpOp::Le
        } else if self.eat_words(&["greater", "than"]) || self.eat_words(&["more", "than"]) {
            CmpOp::Gt
        } else if self.eat_words(&["less", "than"]) {
            CmpOp::Lt
        } else if self.eat_words(&["at", "least"]) {
            CmpOp::Ge
        } else if self.eat_words(&["at", "most"]) {
            CmpOp::Le
        } else if self.eat_words(&["equal", "to"]) {
            CmpOp::Eq
        } else if self.eat_word("above") {
            CmpOp::Gt
        } else if self.eat_word("below") {
            CmpOp::Lt
        } else {
            return None;
        };
        Some(op)
    }

    fn operand(&mut self) -> Result<Term, FrontendError> {
        match self.peek().map(|t| &t.tok) {
            Some(Tok::Number(n)) => {
                self.pos += 1;
                Ok(Term::Number(*n))
            }
            Some(Tok::Placeholder(p)) => {
                self.pos += 1;
                Ok(Term::Placeholder(p.clone()))
            }
            _ => self.noun_phrase(&[], "a number or noun phrase"),
        }
    }

    pub(crate) fn value(&mut self) -> Result<ValueTerm, FrontendError> {
        match self.peek().map(|t| &t.tok) {
            Some(Tok::Number(n)) => {
                self.pos += 1;
                return Ok(ValueTerm::Number(*n));
            }
            Some(Tok::Placeholder(p)) => {
                self.pos += 1;
                return Ok(ValueTerm::Placeholder(p.clone()));
            }
            Some(Tok::Quoted(q)) => {
                self.pos += 1;
                return Ok(ValueTerm::Words(q.split_whitespace().map(str::to_string).collect()));
            }
            _ => {}
        }
        let mut words = Vec::new();
        while !self.at_boundary() {
            match self.peek().map(|t| &t.tok) {
                Some(Tok::Word(w)) => {
                    words.push(w.clone());
                    self.pos += 1;
                }
                _ => break,
            }
        }
        if words.is_empty() {
            return Err(self.error("a value"));
        }
        Ok(ValueTerm::Words(words))
    }

    pub(crate) fn action(&mut self) -> Result<Action, FrontendError> {
        if self.eat_word("initiate") || self.eat_word("activate") {
            let target = self.noun_phrase(&[], "what to initiate")?;
            return Ok(Action::Initiate(target));
        }
        let subject = self.subject()?;
        let set = self.eat_words(&["shall", "be", "set", "to"])
            || self.eat_words(&["is", "set", "to"])
            || self.eat_words(&["shall", "be"]);
        if !set {
            return Err(self.error("`shall be set to`"));
        }
        Ok(Action::SetTo {
            subject,
            value: self.value()?,
        })
    }

    pub(crate) fn eat_comma(&mut self) -> bool {
        if matches!(self.peek().map(|t| &t.tok), Some(Tok::Comma)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// Consumes an optional trailing period.
    pub(crate) fn finish_sentence(&mut self) {
        if matches!(self.peek().map(|t| &t.tok), Some(Tok::Period)) {
            self.pos += 1;
        }
    }
}

/// How placeholder slots and state variables are named while lowering one
/// Gherkin step group (or a requirement sentence, which has no slots).
pub(crate) struct LowerCtx<'a> {
    pub row: &'a BTreeMap<String, String>,
    /// Given/When: a placeholder in value position names the variable.
    pub slot_names_variable: bool,
    /// Subject renames for the initial/final state split.
    pub renames: &'a BTreeMap<String, String>,
    pub file: &'a str,
    pub line: usize,
}

impl LowerCtx<'_> {
    fn cell(&self, name: &str) -> Result<&str, FrontendError> {
        self.row
            .get(name)
            .map(String::as_str)
            .ok_or_else(|| FrontendError::UnboundPlaceholder {
                name: name.to_string(),
                line: self.line,
            })
    }

    fn span(&self, original: String) -> SourceSpan {
        SourceSpan {
            file: self.file.to_string(),
            line: self.line,
            original,
        }
    }
}

/// Base variable name of a subject, before any state split.
pub(crate) fn subject_name(term: &Term, ctx: &LowerCtx) -> Result<String, FrontendError> {
    match term {
        Term::Phrase {
            words,
            calibratable,
            start,
        } => {
            let base = snake_case(&words.join(" ")).ok_or_else(|| FrontendError::UnsupportedPhrase {
                at: Location::Offset(*start),
                span: words.join(" "),
            })?;
            Ok(if *calibratable {
                format!("calibratable_{base}")
            } else {
                base
            })
        }
        Term::Placeholder(p) => {
            let cell = ctx.cell(p)?;
            snake_case(cell).ok_or_else(|| FrontendError::UnsupportedPhrase {
                at: Location::Offset(0),
                span: cell.to_string(),
            })
        }
        Term::Number(n) => Err(FrontendError::UnsupportedPhrase {
            at: Location::Offset(0),
            span: n.to_string(),
        }),
    }
}

fn original_text(term: &Term, ctx: &LowerCtx) -> String {
    match term {
        Term::Phrase {
            words,
            calibratable,
            ..
        } => {
            let body = words.join(" ");
            if *calibratable {
                format!("CALIBRATABLE {body}")
            } else {
                body
            }
        }
        Term::Placeholder(p) => ctx.row.get(p).cloned().unwrap_or_default(),
        Term::Number(n) => n.to_string(),
    }
}

enum Resolved {
    Bool(bool),
    Enum(String),
    Number(i64),
}

/// Reads a value phrase: TRUE/FALSE become polarities, integers stay
/// numeric, everything else is a snake-case enum value. `negated` with a
/// multi-word phrase folds the negation into the value name
/// (`not plugged in` becomes `not_plugged_in`).
fn resolve_value(words: &[String], negated: bool) -> Result<(Resolved, bool), FrontendError> {
    let joined = words.join(" ");
    if words.len() == 1 {
        if joined.eq_ignore_ascii_case("true") {
            return Ok((Resolved::Bool(true), negated));
        }
        if joined.eq_ignore_ascii_case("false") {
            return Ok((Resolved::Bool(false), negated));
        }
        if let Ok(n) = joined.parse::<i64>() {
            return Ok((Resolved::Number(n), negated));
        }
    }
    let name = snake_case(&joined).ok_or_else(|| FrontendError::UnsupportedPhrase {
        at: Location::Offset(0),
        span: joined.clone(),
    })?;
    if negated && words.len() > 1 {
        return Ok((Resolved::Enum(format!("not_{name}")), false));
    }
    Ok((Resolved::Enum(name), negated))
}

fn value_words(value: &ValueTerm, ctx: &LowerCtx) -> Result<Vec<String>, FrontendError> {
    Ok(match value {
        ValueTerm::Words(ws) => ws.clone(),
        ValueTerm::Number(n) => vec![n.to_string()],
        ValueTerm::Placeholder(p) => ctx.cell(p)?.split_whitespace().map(str::to_string).collect(),
    })
}

/// The atom asserting `var` takes `value`, recording the usage.
fn state_atom(
    var: &str,
    value: Resolved,
    negated: bool,
    sorts: &mut SortCollector,
) -> Result<Formula, FrontendError> {
    let atom = match value {
        Resolved::Bool(b) => {
            sorts.use_bool(var)?;
            let f = Formula::bool_var(var);
            return Ok(if b != negated { f } else { Formula::not(f) });
        }
        Resolved::Enum(v) => {
            sorts.use_enum(var, &v)?;
            Formula::enum_eq(var, &v)
        }
        Resolved::Number(n) => {
            sorts.use_numeric(var)?;
            Formula::cmp_const(var, CmpOp::Eq, n)
        }
    };
    Ok(if negated { Formula::not(atom) } else { atom })
}

pub(crate) fn lower_condition(
    c: &Condition,
    ctx: &LowerCtx,
    sorts: &mut SortCollector,
) -> Result<Formula, FrontendError> {
    let base = subject_name(&c.subject, ctx)?;
    let original = original_text(&c.subject, ctx);
    match &c.predicate {
        Predicate::Compare { op, negated, rhs } => {
            let var = ctx.renames.get(&base).cloned().unwrap_or(base);
            sorts.note_origin(&var, ctx.span(original));
            sorts.use_numeric(&var)?;
            let atom = match rhs {
                Term::Number(n) => Formula::cmp_const(&var, *op, *n),
                Term::Placeholder(p) => {
                    let cell = ctx.cell(p)?;
                    match cell.trim().parse::<i64>() {
                        Ok(n) => Formula::cmp_const(&var, *op, n),
                        Err(_) => {
                            let other = subject_name(rhs, ctx)?;
                            sorts.use_numeric(&other)?;
                            Formula::cmp_var(&var, *op, &other)
                        }
                    }
                }
                Term::Phrase { .. } => {
                    let other = subject_name(rhs, ctx)?;
                    sorts.note_origin(&other, ctx.span(original_text(rhs, ctx)));
                    sorts.use_numeric(&other)?;
                    Formula::cmp_var(&var, *op, &other)
                }
            };
            Ok(if *negated { Formula::not(atom) } else { atom })
        }
        Predicate::Is { negated, value } => lower_state(base, original, *negated, value, ctx, sorts),
        Predicate::ChangesTo(value) => lower_state(base, original, false, value, ctx, sorts),
    }
}

fn lower_state(
    base: String,
    original: String,
    negated: bool,
    value: &ValueTerm,
    ctx: &LowerCtx,
    sorts: &mut SortCollector,
) -> Result<Formula, FrontendError> {
    let var = match value {
        ValueTerm::Placeholder(p) if ctx.slot_names_variable => {
            snake_case(p).ok_or_else(|| FrontendError::UnsupportedPhrase {
                at: Location::Offset(0),
                span: p.clone(),
            })?
        }
        _ => ctx.renames.get(&base).cloned().unwrap_or(base),
    };
    sorts.note_origin(&var, ctx.span(original));
    let words = value_words(value, ctx)?;
    let (resolved, negated) = resolve_value(&words, negated)?;
    state_atom(&var, resolved, negated, sorts)
}

pub(crate) fn lower_conditions(
    tree: &CondTree,
    ctx: &LowerCtx,
    sorts: &mut SortCollector,
) -> Result<Formula, FrontendError> {
    match tree {
        CondTree::Leaf(c) => lower_condition(c, ctx, sorts),
        CondTree::And(cs) => Ok(Formula::and(
            cs.iter()
                .map(|c| lower_conditions(c, ctx, sorts))
                .collect::<Result<_, _>>()?,
        )),
        CondTree::Or(cs) => Ok(Formula::or(
            cs.iter()
                .map(|c| lower_conditions(c, ctx, sorts))
                .collect::<Result<_, _>>()?,
        )),
    }
}

pub(crate) fn lower_action(
    action: &Action,
    ctx: &LowerCtx,
    sorts: &mut SortCollector,
) -> Result<Formula, FrontendError> {
    match action {
        Action::Initiate(target) => {
            let var = subject_name(target, ctx)?;
            sorts.note_origin(&var, ctx.span(original_text(target, ctx)));
            sorts.use_bool(&var)?;
            Ok(Formula::bool_var(&var))
        }
        Action::SetTo { subject, value } => {
            let var = subject_name(subject, ctx)?;
            sorts.note_origin(&var, ctx.span(original_text(subject, ctx)));
            let words = value_words(value, ctx)?;
            let (resolved, negated) = resolve_value(&words, false)?;
            state_atom(&var, resolved, negated, sorts)
        }
    }
}
