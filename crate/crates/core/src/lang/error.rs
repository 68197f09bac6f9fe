use std::fmt;

use thiserror::Error;

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lexical,
    Syntax,
    DuplicateAction,
    DuplicateFluent,
    UnboundVariable,
    NegatedEffect,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub pos: Pos,
    /// Token descriptions that would have been accepted here.
    pub expected: Vec<String>,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(kind: ParseErrorKind, pos: Pos, expected: Vec<String>, found: String) -> Self {
        let message = match expected.len() {
            0 => format!("unexpected {found}"),
            1 => format!("expected {}, found {found}", expected[0]),
            _ => format!("expected one of {}, found {found}", expected.join(" ")),
        };
        ParseError {
            kind,
            pos,
            expected,
            message,
        }
    }

    pub(crate) fn semantic(kind: ParseErrorKind, pos: Pos, message: String) -> Self {
        ParseError {
            kind,
            pos,
            expected: Vec::new(),
            message,
        }
    }
}
