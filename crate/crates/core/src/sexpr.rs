//! Minimal S-expression reader shared by the IR text format and grounding
//! map files.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Symbol(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Symbol(_, p) | SExpr::List(_, p) => *p,
        }
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Symbol(s, _) => f.write_str(s),
            SExpr::List(items, _) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadError {
    pub pos: Pos,
    pub message: String,
}

/// Reads every top-level expression in `text`. Positions are reported
/// relative to `origin` (the location of the first byte of `text`).
pub fn read_all(text: &str, origin: Pos) -> Result<Vec<SExpr>, ReadError> {
    let mut reader = Reader {
        chars: text.chars().collect(),
        idx: 0,
        line: origin.line,
        column: origin.column,
    };
    let mut out = Vec::new();
    loop {
        reader.skip_ws();
        if reader.peek().is_none() {
            return Ok(out);
        }
        out.push(reader.read()?);
    }
}

struct Reader {
    chars: Vec<char>,
    idx: usize,
    line: usize,
    column: usize,
}

impl Reader {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).copied()
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.idx += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn read(&mut self) -> Result<SExpr, ReadError> {
        self.skip_ws();
        let start = self.pos();
        match self.peek() {
            None => Err(ReadError {
                pos: start,
                message: "unexpected end of input".into(),
            }),
            Some(')') => Err(ReadError {
                pos: start,
                message: "unbalanced `)`".into(),
            }),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        None => {
                            return Err(ReadError {
                                pos: start,
                                message: "unclosed `(`".into(),
                            })
                        }
                        Some(')') => {
                            self.bump();
                            return Ok(SExpr::List(items, start));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(_) => {
                let mut sym = String::new();
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' {
                        break;
                    }
                    sym.push(c);
                    self.bump();
                }
                Ok(SExpr::Symbol(sym, start))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ORIGIN: Pos = Pos { line: 1, column: 1 };

    #[test]
    fn reads_nested_lists_with_positions() {
        let exprs = read_all("(implies\n  (>= speed 10) chime)", ORIGIN).unwrap();
        assert_eq!(exprs.len(), 1);
        let SExpr::List(items, _) = &exprs[0] else {
            panic!("expected list")
        };
        assert_eq!(items.len(), 3);
        assert_eq!(items[1].pos(), Pos { line: 2, column: 3 });
        assert_eq!(exprs[0].to_string(), "(implies (>= speed 10) chime)");
    }

    #[test]
    fn reports_unbalanced_input() {
        assert!(read_all("(and a b", ORIGIN).is_err());
        let err = read_all("a)", ORIGIN).unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, column: 2 });
    }
}
