//! Tokenizer for sequent lines.
//!
//! The only numeric literal in sequent syntax is the scalar `1`; decimal
//! complex numbers appear exclusively inside signature files, which have
//! their own reader.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// `#name`
    ConstName(String),
    /// The scalar literal `1`.
    One,
    /// `|-`
    Turnstile,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    /// `:[` opening an inline type annotation on a connection.
    ColonBracket,
    At,
    Dot,
    Caret,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Tok::Ident(n) => return write!(f, "`{n}`"),
            Tok::ConstName(n) => return write!(f, "`#{n}`"),
            Tok::One => "`1`",
            Tok::Turnstile => "`|-`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::Comma => "`,`",
            Tok::Colon => "`:`",
            Tok::ColonBracket => "`:[`",
            Tok::At => "`@`",
            Tok::Dot => "`.`",
            Tok::Caret => "`^`",
        };
        write!(f, "{s}")
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Tokenize one line; columns are 1-based character positions for error
/// reporting.
pub fn lex(line_no: usize, src: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let col = i + 1;
        let c = chars[i];
        match c {
            ' ' | '\t' => {
                i += 1;
            }
            '{' => {
                out.push((Tok::LBrace, col));
                i += 1;
            }
            '}' => {
                out.push((Tok::RBrace, col));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, col));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, col));
                i += 1;
            }
            '[' => {
                out.push((Tok::LBracket, col));
                i += 1;
            }
            ']' => {
                out.push((Tok::RBracket, col));
                i += 1;
            }
            ',' => {
                out.push((Tok::Comma, col));
                i += 1;
            }
            '@' => {
                out.push((Tok::At, col));
                i += 1;
            }
            '.' => {
                out.push((Tok::Dot, col));
                i += 1;
            }
            '^' => {
                out.push((Tok::Caret, col));
                i += 1;
            }
            ':' => {
                if chars.get(i + 1) == Some(&'[') {
                    out.push((Tok::ColonBracket, col));
                    i += 2;
                } else {
                    out.push((Tok::Colon, col));
                    i += 1;
                }
            }
            '|' => {
                if chars.get(i + 1) == Some(&'-') {
                    out.push((Tok::Turnstile, col));
                    i += 2;
                } else {
                    return Err(Error::parse(line_no, col, "expected `|-`"));
                }
            }
            '#' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && is_ident_continue(chars[j]) {
                    j += 1;
                }
                if j == start {
                    return Err(Error::parse(
                        line_no,
                        col,
                        "`#` must be followed by a constant name",
                    ));
                }
                out.push((Tok::ConstName(chars[start..j].iter().collect()), col));
                i = j;
            }
            '1' => {
                // A digit that continues into an identifier tail is not the
                // scalar literal; nothing in the grammar allows that.
                if chars.get(i + 1).is_some_and(|c| is_ident_continue(*c)) {
                    return Err(Error::parse(line_no, col, "unexpected digit sequence"));
                }
                out.push((Tok::One, col));
                i += 1;
            }
            c if c.is_ascii_digit() => {
                return Err(Error::parse(
                    line_no,
                    col,
                    format!("unexpected digit `{c}` (only the scalar `1` is a term)"),
                ));
            }
            c if is_ident_start(c) => {
                let start = i;
                let mut j = i;
                while j < chars.len() && is_ident_continue(chars[j]) {
                    j += 1;
                }
                out.push((Tok::Ident(chars[start..j].iter().collect()), col));
                i = j;
            }
            other => {
                return Err(Error::parse(
                    line_no,
                    col,
                    format!("unexpected character `{other}`"),
                ));
            }
        }
    }
    Ok(out)
}
