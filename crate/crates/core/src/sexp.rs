//! Minimal s-expression reader shared by all text formats.

use crate::error::{Error, Result};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom { text: String, line: usize, col: usize },
    List { items: Vec<Sexp>, line: usize, col: usize },
}

impl Sexp {
    pub fn pos(&self) -> (usize, usize) {
        match self {
            Sexp::Atom { line, col, .. } | Sexp::List { line, col, .. } => (*line, *col),
        }
    }

    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom { text, .. } => Some(text),
            _ => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List { items, .. } => Some(items),
            _ => None,
        }
    }

    pub fn err(&self, msg: impl Into<String>) -> Error {
        let (l, c) = self.pos();
        Error::parse(l, c, msg)
    }

    pub fn expect_atom(&self, what: &str) -> Result<&str> {
        self.atom().ok_or_else(|| self.err(format!("expected {what}")))
    }

    pub fn expect_list(&self, what: &str) -> Result<&[Sexp]> {
        self.list().ok_or_else(|| self.err(format!("expected {what}")))
    }

    /// Head atom of a list form, if any.
    pub fn head(&self) -> Option<&str> {
        self.list().and_then(|l| l.first()).and_then(|h| h.atom())
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom { text, .. } => write!(f, "{text}"),
            Sexp::List { items, .. } => {
                write!(f, "(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{it}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Parses every top-level form in `src`. `;` starts a line comment.
pub fn parse_all(src: &str) -> Result<Vec<Sexp>> {
    let mut stack: Vec<(Vec<Sexp>, usize, usize)> = Vec::new();
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 0;
    let mut chars = src.chars().peekable();
    let mut tok = String::new();
    let mut tok_pos = (0, 0);

    fn flush(tok: &mut String, pos: (usize, usize), stack: &mut [(Vec<Sexp>, usize, usize)], out: &mut Vec<Sexp>) {
        if tok.is_empty() {
            return;
        }
        let a = Sexp::Atom { text: std::mem::take(tok), line: pos.0, col: pos.1 };
        match stack.last_mut() {
            Some((items, _, _)) => items.push(a),
            None => out.push(a),
        }
    }

    while let Some(c) = chars.next() {
        if c == '\n' {
            flush(&mut tok, tok_pos, &mut stack, &mut out);
            line += 1;
            col = 0;
            continue;
        }
        col += 1;
        match c {
            ';' => {
                flush(&mut tok, tok_pos, &mut stack, &mut out);
                while let Some(&n) = chars.peek() {
                    if n == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' => {
                flush(&mut tok, tok_pos, &mut stack, &mut out);
                stack.push((Vec::new(), line, col));
            }
            ')' => {
                flush(&mut tok, tok_pos, &mut stack, &mut out);
                let (items, l, c0) = stack.pop().ok_or_else(|| Error::parse(line, col, "unbalanced ')'"))?;
                let node = Sexp::List { items, line: l, col: c0 };
                match stack.last_mut() {
                    Some((p, _, _)) => p.push(node),
                    None => out.push(node),
                }
            }
            c if c.is_whitespace() => flush(&mut tok, tok_pos, &mut stack, &mut out),
            c => {
                if tok.is_empty() {
                    tok_pos = (line, col);
                }
                tok.push(c);
            }
        }
    }
    flush(&mut tok, tok_pos, &mut stack, &mut out);
    if let Some((_, l, c)) = stack.last() {
        return Err(Error::parse(*l, *c, "unclosed '('"));
    }
    Ok(out)
}

/// Parses exactly one form.
pub fn parse_one(src: &str) -> Result<Sexp> {
    let mut v = parse_all(src)?;
    match v.len() {
        1 => Ok(v.pop().unwrap()),
        0 => Err(Error::parse(1, 1, "empty input")),
        _ => {
            let (l, c) = v[1].pos();
            Err(Error::parse(l, c, "trailing input"))
        }
    }
}
