//! Source spans and diagnostics. Every error produced by the lexer, parser,
//! or resolver points at a byte span of the input and renders as
//! `line:col: message`.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn point(at: usize) -> Self {
        Span { start: at, end: at + 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub span: Span,
    pub message: String,
    /// Token kinds that would have been accepted, for parse errors.
    pub expected: Vec<String>,
}

impl Diagnostic {
    pub fn new(span: Span, message: impl Into<String>) -> Self {
        Diagnostic { span, message: message.into(), expected: Vec::new() }
    }

    pub fn expecting(span: Span, message: impl Into<String>, expected: Vec<String>) -> Self {
        Diagnostic { span, message: message.into(), expected }
    }

    /// Resolve the span against the source text as 1-based line and column.
    pub fn position(&self, source: &str) -> (usize, usize) {
        let mut line = 1;
        let mut col = 1;
        for (i, ch) in source.char_indices() {
            if i >= self.span.start {
                break;
            }
            if ch == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        (line, col)
    }

    pub fn render(&self, source: &str) -> String {
        let (line, col) = self.position(source);
        if self.expected.is_empty() {
            format!("{line}:{col}: {}", self.message)
        } else {
            format!("{line}:{col}: {}; expected {}", self.message, self.expected.join(", "))
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (at byte {})", self.message, self.span.start)
    }
}

pub type ParseResult<T> = std::result::Result<T, Diagnostic>;
