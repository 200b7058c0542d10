//! Concrete text syntax for atoms and assumption files.
//!
//! ```text
//! atom     := "excl" degree? "(" varlist ";" varlist ")"
//! degree   := "[" rational "]"
//! rational := INT "/" INT | INT | DECIMAL
//! varlist  := IDENT (WS IDENT)*
//! ```
//!
//! An omitted degree means 0.

use thiserror::Error;

use crate::model::{Atom, ModelError, Rational, VarTuple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Model {
        line: usize,
        #[source]
        source: ModelError,
    },
}

impl ParseError {
    fn at_line(self, line: usize) -> Self {
        match self {
            ParseError::Syntax { message, .. } => ParseError::Syntax { line, message },
            ParseError::Model { source, .. } => ParseError::Model { line, source },
        }
    }
}

fn syntax(message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line: 1,
        message: message.into(),
    }
}

fn model(source: ModelError) -> ParseError {
    ParseError::Model { line: 1, source }
}

pub fn parse_atom(text: &str) -> Result<Atom, ParseError> {
    let s = text.trim();
    let rest = s
        .strip_prefix("excl")
        .ok_or_else(|| syntax(format!("expected `excl(...)`, found `{s}`")))?
        .trim_start();
    let (degree, rest) = match rest.strip_prefix('[') {
        Some(after) => {
            let (inside, tail) = after
                .split_once(']')
                .ok_or_else(|| syntax("unclosed `[`"))?;
            let degree: Rational = inside.parse().map_err(model)?;
            (degree, tail.trim_start())
        }
        None => (Rational::ZERO, rest),
    };
    let body = rest
        .strip_prefix('(')
        .and_then(|b| b.strip_suffix(')'))
        .ok_or_else(|| syntax("expected `( varlist ; varlist )`"))?;
    let (left, right) = body
        .split_once(';')
        .ok_or_else(|| syntax("missing `;` between the tuples"))?;
    if right.contains(';') {
        return Err(syntax("more than one `;`"));
    }
    let tuple = |part: &str, which: &str| {
        if part.trim().is_empty() {
            return Err(syntax(format!("empty {which} tuple")));
        }
        VarTuple::parse(part).map_err(model)
    };
    let left = tuple(left, "left")?;
    let right = tuple(right, "right")?;
    Atom::new(left, right, degree).map_err(model)
}

/// Inverse of [`parse_atom`]: `excl(x1 x2 ; y1 y2)` or `excl[1/4](x ; y)`.
pub fn render_atom(atom: &Atom) -> String {
    if atom.degree().is_zero() {
        format!("excl({} ; {})", atom.left(), atom.right())
    } else {
        format!(
            "excl[{}]({} ; {})",
            atom.degree(),
            atom.left(),
            atom.right()
        )
    }
}

/// One atom per line; `#` starts a comment; blank lines are skipped.
pub fn parse_assumptions(text: &str) -> Result<Vec<Atom>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        out.push(parse_atom(content).map_err(|e| e.at_line(i + 1))?);
    }
    Ok(out)
}
