//! Tokenizer. Numbers are exact: integers and decimals (with optional
//! exponent) become big rationals; no floating point enters through source
//! text. Comments run from `#` to end of line.

use crate::diag::{Diagnostic, ParseResult, Span};
use jetreduce_core::Rat;
use num_bigint::BigInt;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Number(Rat),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Colon,
    Eq,
    Arrow,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Wedge,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(_) => "number".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Wedge => "`^^`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn lex(source: &str) -> ParseResult<Vec<Token>> {
    let bytes = source.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                i += 1;
            }
            '#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            '{' => push(&mut out, Tok::LBrace, i, &mut i),
            '}' => push(&mut out, Tok::RBrace, i, &mut i),
            '(' => push(&mut out, Tok::LParen, i, &mut i),
            ')' => push(&mut out, Tok::RParen, i, &mut i),
            '[' => push(&mut out, Tok::LBracket, i, &mut i),
            ']' => push(&mut out, Tok::RBracket, i, &mut i),
            ';' => push(&mut out, Tok::Semi, i, &mut i),
            ',' => push(&mut out, Tok::Comma, i, &mut i),
            ':' => push(&mut out, Tok::Colon, i, &mut i),
            '=' => push(&mut out, Tok::Eq, i, &mut i),
            '+' => push(&mut out, Tok::Plus, i, &mut i),
            '*' => push(&mut out, Tok::Star, i, &mut i),
            '/' => push(&mut out, Tok::Slash, i, &mut i),
            '-' => {
                if i + 1 < bytes.len() && bytes[i + 1] == b'>' {
                    out.push(Token { tok: Tok::Arrow, span: Span::new(i, i + 2) });
                    i += 2;
                } else {
                    push(&mut out, Tok::Minus, i, &mut i);
                }
            }
            '^' => {
                if i + 1 < bytes.len() && bytes[i + 1] == b'^' {
                    out.push(Token { tok: Tok::Wedge, span: Span::new(i, i + 2) });
                    i += 2;
                } else {
                    push(&mut out, Tok::Caret, i, &mut i);
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(source[start..i].to_string()),
                    span: Span::new(start, i),
                });
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                let mut frac_digits = 0usize;
                if i < bytes.len() && bytes[i] == b'.' {
                    // Distinguish `1.5` from a stray dot.
                    if i + 1 < bytes.len() && (bytes[i + 1] as char).is_ascii_digit() {
                        i += 1;
                        let frac_start = i;
                        while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                            i += 1;
                        }
                        frac_digits = i - frac_start;
                    }
                }
                let mut exponent: i64 = 0;
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    let mut sign = 1i64;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        if bytes[j] == b'-' {
                            sign = -1;
                        }
                        j += 1;
                    }
                    if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        let estart = j;
                        while j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                            j += 1;
                        }
                        let raw: i64 = source[estart..j].parse().map_err(|_| {
                            Diagnostic::new(Span::new(estart, j), "exponent out of range")
                        })?;
                        exponent = sign * raw;
                        i = j;
                    }
                }
                let text = &source[start..i];
                let digits: String = text
                    .chars()
                    .take_while(|c| *c != 'e' && *c != 'E')
                    .filter(|c| *c != '.')
                    .collect();
                let mantissa: BigInt = digits.parse().map_err(|_| {
                    Diagnostic::new(Span::new(start, i), "number out of range")
                })?;
                let shift = exponent - frac_digits as i64;
                let value = if shift >= 0 {
                    Rat::new(mantissa * BigInt::from(10).pow(shift as u32), BigInt::from(1))
                } else {
                    Rat::new(mantissa, BigInt::from(10).pow((-shift) as u32))
                };
                out.push(Token { tok: Tok::Number(value), span: Span::new(start, i) });
            }
            other => {
                return Err(Diagnostic::new(
                    Span::point(i),
                    format!("unexpected character `{other}`"),
                ))
            }
        }
    }
    out.push(Token { tok: Tok::Eof, span: Span::point(source.len()) });
    Ok(out)
}

fn push(out: &mut Vec<Token>, tok: Tok, at: usize, i: &mut usize) {
    out.push(Token { tok, span: Span::point(at) });
    *i += 1;
}

#[cfg(test)]
mod tests {
    use super::*;
    use jetreduce_core::scalar::Scalar;

    #[test]
    fn numbers_are_exact_rationals() {
        let toks = lex("3 1.5 2e3 1.25e-2").unwrap();
        let nums: Vec<Rat> = toks
            .iter()
            .filter_map(|t| match &t.tok {
                Tok::Number(r) => Some(r.clone()),
                _ => None,
            })
            .collect();
        assert_eq!(nums[0], Rat::from_i64(3));
        assert_eq!(nums[1], Rat::from_fraction(3, 2));
        assert_eq!(nums[2], Rat::from_i64(2000));
        assert_eq!(nums[3], Rat::from_fraction(1, 80));
    }

    #[test]
    fn arrows_and_wedges() {
        let toks = lex("a -> b ^^ c ^ 2").unwrap();
        let kinds: Vec<&Tok> = toks.iter().map(|t| &t.tok).collect();
        assert!(matches!(kinds[1], Tok::Arrow));
        assert!(matches!(kinds[3], Tok::Wedge));
        assert!(matches!(kinds[5], Tok::Caret));
    }

    #[test]
    fn comments_are_skipped() {
        let toks = lex("a # comment\n b").unwrap();
        assert_eq!(toks.len(), 3);
    }

    #[test]
    fn bad_character_is_spanned() {
        let err = lex("abc $").unwrap_err();
        assert_eq!(err.span.start, 4);
    }
}
