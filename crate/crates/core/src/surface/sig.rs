//! Signature files (`.dsig`).
//!
//! Line-oriented: blank lines and lines starting with `#` are skipped.
//!
//! ```text
//! type A dim 2
//! const f : (A^ @ B)
//! const u : (A^ @ A) = [[1+0i, 0+0i], [0+0i, 1+0i]]
//! ```
//!
//! Types must be declared before constants that mention them.  A constant's
//! value is a bracket nesting that follows the atomic slot list of its type
//! (unit slots contribute no level; a fully scalar type takes a bare
//! complex literal).  Complex literals are `a`, `a+bi`, or `a-bi` with
//! plain decimal parts.

use super::parse::parse_type;
use crate::error::{Error, Result};
use crate::model::{Lit, Signature, Tensor};
use num_complex::Complex64;

pub fn parse_signature(text: &str) -> Result<Signature> {
    let mut sig = Signature::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        parse_decl(&mut sig, line).map_err(|e| contextualize(e, line_no))?;
    }
    Ok(sig)
}

fn contextualize(e: Error, line_no: usize) -> Error {
    match e {
        Error::Parse { col, msg, .. } => Error::Parse { line: line_no, col, msg },
        Error::Model(m) => Error::Model(format!("line {line_no}: {m}")),
        Error::Type(m) => Error::Type(format!("line {line_no}: {m}")),
        other => other,
    }
}

fn parse_decl(sig: &mut Signature, line: &str) -> Result<()> {
    if let Some(rest) = line.strip_prefix("type ") {
        let fields: Vec<&str> = rest.split_whitespace().collect();
        match fields.as_slice() {
            [name, "dim", n] => {
                let dim: usize = n.parse().map_err(|_| {
                    Error::Model(format!("bad dimension `{n}` for type {name}"))
                })?;
                if *name == "I" {
                    return Err(Error::Model("`I` is the built-in unit type".into()));
                }
                sig.declare_type(*name, dim)
            }
            _ => Err(Error::Model(format!(
                "malformed type declaration `type {rest}` (expected `type NAME dim N`)"
            ))),
        }
    } else if let Some(rest) = line.strip_prefix("const ") {
        let (name, after) = rest.split_once(':').ok_or_else(|| {
            Error::Model(format!("malformed constant declaration `const {rest}`"))
        })?;
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            return Err(Error::Model(format!("bad constant name `{name}`")));
        }
        let (ty_src, lit_src) = match after.split_once('=') {
            Some((t, l)) => (t, Some(l)),
            None => (after, None),
        };
        let ty = parse_type(ty_src.trim())?;
        let value = match lit_src {
            Some(src) => {
                let lit = parse_lit(src.trim())?;
                let shape = sig.slot_dims(&ty)?;
                Some(Tensor::from_lit(&lit, shape)?)
            }
            None => None,
        };
        sig.declare_const(name, ty, value)
    } else {
        Err(Error::Model(format!(
            "unrecognized declaration `{line}` (expected `type` or `const`)"
        )))
    }
}

/// Parse a nested bracket literal with complex scalar leaves.
fn parse_lit(src: &str) -> Result<Lit> {
    let chars: Vec<char> = src.chars().collect();
    let mut pos = 0;
    let lit = lit_value(&chars, &mut pos)?;
    skip_ws(&chars, &mut pos);
    if pos != chars.len() {
        return Err(Error::parse(1, pos + 1, "trailing input after tensor literal"));
    }
    Ok(lit)
}

fn skip_ws(chars: &[char], pos: &mut usize) {
    while chars.get(*pos).is_some_and(|c| c.is_whitespace()) {
        *pos += 1;
    }
}

fn lit_value(chars: &[char], pos: &mut usize) -> Result<Lit> {
    skip_ws(chars, pos);
    if chars.get(*pos) == Some(&'[') {
        *pos += 1;
        let mut items = Vec::new();
        loop {
            skip_ws(chars, pos);
            if chars.get(*pos) == Some(&']') {
                *pos += 1;
                break;
            }
            items.push(lit_value(chars, pos)?);
            skip_ws(chars, pos);
            match chars.get(*pos) {
                Some(',') => {
                    *pos += 1;
                }
                Some(']') => {}
                _ => {
                    return Err(Error::parse(
                        1,
                        *pos + 1,
                        "expected `,` or `]` in tensor literal",
                    ))
                }
            }
        }
        Ok(Lit::List(items))
    } else {
        let start = *pos;
        while chars
            .get(*pos)
            .is_some_and(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'i'))
        {
            *pos += 1;
        }
        if *pos == start {
            return Err(Error::parse(1, start + 1, "expected a complex literal"));
        }
        let tok: String = chars[start..*pos].iter().collect();
        Ok(Lit::Scalar(parse_complex(&tok).map_err(|m| Error::parse(1, start + 1, m))?))
    }
}

/// `a`, `a+bi`, or `a-bi` with decimal `a`, `b`.
pub fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    fn take_float(s: &str) -> Option<(f64, &str)> {
        let mut end = 0;
        let bytes = s.as_bytes();
        if end < bytes.len() && (bytes[end] == b'+' || bytes[end] == b'-') {
            end += 1;
        }
        let digits_start = end;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end == digits_start {
            return None;
        }
        s[..end].parse().ok().map(|v| (v, &s[end..]))
    }

    let (re, rest) = take_float(s).ok_or_else(|| format!("bad complex literal `{s}`"))?;
    if rest.is_empty() {
        return Ok(Complex64::new(re, 0.0));
    }
    let (im, rest) = take_float(rest).ok_or_else(|| format!("bad complex literal `{s}`"))?;
    if rest == "i" {
        Ok(Complex64::new(re, im))
    } else {
        Err(format!("bad complex literal `{s}` (expected `a+bi`)"))
    }
}
