//! Derivation scripts (`.dprf`): S-expressions of rule applications.
//!
//! A file holds one expression (comment lines starting with `#` and blank
//! lines are stripped first).  Atoms are whitespace-delimited; type and
//! term arguments may be written either as a single atom (`A^@B`) or as a
//! parenthesized group (`(A^ @ B)`), which is re-rendered to source text
//! and handed to the type/term parser by the replayer.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s) => Some(s),
            Sexp::List(_) => None,
        }
    }

    /// Render back to source text, suitable for the type/term parsers.
    pub fn to_source(&self) -> String {
        match self {
            Sexp::Atom(s) => s.clone(),
            Sexp::List(items) => {
                let parts: Vec<String> = items.iter().map(Sexp::to_source).collect();
                format!("({})", parts.join(" "))
            }
        }
    }
}

/// Parse the single S-expression of a script file.
pub fn parse_script(text: &str) -> Result<Sexp> {
    let mut cleaned = String::new();
    for line in text.lines() {
        let t = line.trim_start();
        if t.starts_with('#') {
            cleaned.push('\n');
        } else {
            cleaned.push_str(line);
            cleaned.push('\n');
        }
    }
    let toks = tokenize(&cleaned)?;
    let mut pos = 0;
    let sexp = parse_one(&toks, &mut pos)?;
    if pos != toks.len() {
        return Err(Error::parse(
            1,
            1,
            "trailing input after the derivation expression",
        ));
    }
    Ok(sexp)
}

enum ScriptTok {
    Open,
    Close,
    Atom(String),
}

fn tokenize(text: &str) -> Result<Vec<ScriptTok>> {
    let mut out = Vec::new();
    let mut atom = String::new();
    for c in text.chars() {
        match c {
            '(' | ')' => {
                if !atom.is_empty() {
                    out.push(ScriptTok::Atom(std::mem::take(&mut atom)));
                }
                out.push(if c == '(' { ScriptTok::Open } else { ScriptTok::Close });
            }
            c if c.is_whitespace() => {
                if !atom.is_empty() {
                    out.push(ScriptTok::Atom(std::mem::take(&mut atom)));
                }
            }
            c => atom.push(c),
        }
    }
    if !atom.is_empty() {
        out.push(ScriptTok::Atom(atom));
    }
    if out.is_empty() {
        return Err(Error::parse(1, 1, "empty derivation script"));
    }
    Ok(out)
}

fn parse_one(toks: &[ScriptTok], pos: &mut usize) -> Result<Sexp> {
    match toks.get(*pos) {
        Some(ScriptTok::Atom(s)) => {
            *pos += 1;
            Ok(Sexp::Atom(s.clone()))
        }
        Some(ScriptTok::Open) => {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                match toks.get(*pos) {
                    Some(ScriptTok::Close) => {
                        *pos += 1;
                        return Ok(Sexp::List(items));
                    }
                    Some(_) => items.push(parse_one(toks, pos)?),
                    None => {
                        return Err(Error::parse(1, 1, "unbalanced `(` in derivation script"))
                    }
                }
            }
        }
        Some(ScriptTok::Close) => Err(Error::parse(1, 1, "unexpected `)`")),
        None => Err(Error::parse(1, 1, "empty derivation script")),
    }
}
