//! Recursive-descent parser for types, terms, and sequents.
//!
//! Precedence, tightest first: postfix `^`, scalar product `.`, tensor `@`
//! (left-associative).  Connections inside `{ ... }` may carry an inline
//! annotation `l :[T] r`; unannotated connections get their type inferred
//! by propagation from the annotated positions, and parsing fails with a
//! request for an annotation when propagation cannot determine it.

use super::lex::{lex, Tok};
use crate::error::{Error, Result};
use crate::sequent::{check_term, Connection, Sequent, Soup, TypedTerm};
use crate::term::Term;
use crate::types::Ty;
use std::collections::BTreeMap;

pub fn parse_type(src: &str) -> Result<Ty> {
    let mut p = Parser::new(1, src)?;
    let t = p.ty()?;
    p.expect_end()?;
    Ok(t)
}

pub fn parse_term(src: &str) -> Result<Term> {
    let mut p = Parser::new(1, src)?;
    let t = p.term()?;
    p.expect_end()?;
    Ok(t)
}

/// Parse a single sequent from one line of text.
pub fn parse_sequent(src: &str) -> Result<Sequent> {
    parse_sequent_line(1, src)
}

pub fn parse_sequent_line(line_no: usize, src: &str) -> Result<Sequent> {
    let mut p = Parser::new(line_no, src)?;
    p.sequent()
}

/// Parse a whole `.dlc` text: one sequent per nonblank line whose first
/// non-whitespace character is not `#`.
pub fn parse_sequents(text: &str) -> Result<Vec<Sequent>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let line_no = idx + 1;
        out.push(parse_sequent_line(line_no, line).map_err(|e| at_line(e, line_no))?);
    }
    Ok(out)
}

/// Attach a line number to errors that lack one.
fn at_line(e: Error, line_no: usize) -> Error {
    match e {
        Error::Parse { col, msg, .. } => Error::Parse { line: line_no, col, msg },
        Error::Type(m) => Error::Type(format!("line {line_no}: {m}")),
        Error::Linearity(m) => Error::Linearity(format!("line {line_no}: {m}")),
        other => other,
    }
}

struct Parser {
    line: usize,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

struct RawConn {
    left: Term,
    right: Term,
    ty: Option<Ty>,
}

impl Parser {
    fn new(line: usize, src: &str) -> Result<Parser> {
        Ok(Parser { line, toks: lex(line, src)?, pos: 0 })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|(_, c)| *c)
            .unwrap_or(1)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            let found = match self.peek() {
                Some(t) => format!("{t}"),
                None => "end of line".into(),
            };
            Err(Error::parse(
                self.line,
                self.col(),
                format!("expected {tok}, found {found}"),
            ))
        }
    }

    fn expect_end(&mut self) -> Result<()> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            Err(Error::parse(
                self.line,
                self.col(),
                format!("unexpected trailing {}", self.peek().unwrap()),
            ))
        }
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::parse(self.line, self.col(), msg))
    }

    // ----- types -----

    fn ty(&mut self) -> Result<Ty> {
        let mut t = self.ty_postfix()?;
        while self.eat(&Tok::At) {
            let r = self.ty_postfix()?;
            t = Ty::tensor(t, r);
        }
        Ok(t)
    }

    fn ty_postfix(&mut self) -> Result<Ty> {
        let mut t = self.ty_atom()?;
        while self.eat(&Tok::Caret) {
            t = t.negate();
        }
        Ok(t)
    }

    fn ty_atom(&mut self) -> Result<Ty> {
        match self.next() {
            Some(Tok::Ident(name)) if name == "I" => Ok(Ty::Unit),
            Some(Tok::Ident(name)) => Ok(Ty::Atom(name)),
            Some(Tok::LParen) => {
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some(other) => {
                self.pos -= 1;
                self.fail(format!("expected a type, found {other}"))
            }
            None => self.fail("expected a type, found end of line"),
        }
    }

    // ----- terms -----

    fn term(&mut self) -> Result<Term> {
        let mut t = self.term_product()?;
        while self.eat(&Tok::At) {
            let r = self.term_product()?;
            t = Term::tensor(t, r);
        }
        Ok(t)
    }

    fn term_product(&mut self) -> Result<Term> {
        let first = self.term_postfix()?;
        if self.peek() != Some(&Tok::Dot) {
            return Ok(first);
        }
        let mut fs = vec![first];
        while self.eat(&Tok::Dot) {
            fs.push(self.term_postfix()?);
        }
        Ok(Term::product(fs))
    }

    fn term_postfix(&mut self) -> Result<Term> {
        let mut t = self.term_atom()?;
        while self.eat(&Tok::Caret) {
            t = t.negate();
        }
        Ok(t)
    }

    fn term_atom(&mut self) -> Result<Term> {
        match self.next() {
            Some(Tok::One) => Ok(Term::One),
            Some(Tok::ConstName(name)) => Ok(Term::Const(name)),
            Some(Tok::Ident(name)) if name == "D" && self.peek() == Some(&Tok::LBracket) => {
                self.expect(Tok::LBracket)?;
                let ty = self.ty()?;
                self.expect(Tok::RBracket)?;
                Ok(Term::dim(ty))
            }
            Some(Tok::Ident(name)) => Ok(Term::Var(name)),
            Some(Tok::LParen) => {
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some(other) => {
                self.pos -= 1;
                self.fail(format!("expected a term, found {other}"))
            }
            None => self.fail("expected a term, found end of line"),
        }
    }

    // ----- sequents -----

    fn sequent(&mut self) -> Result<Sequent> {
        let mut context = Vec::new();
        if self.peek() != Some(&Tok::Turnstile) {
            loop {
                let term = self.term()?;
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                context.push(TypedTerm::new(term, ty));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::Turnstile)?;

        let mut conns = Vec::new();
        if self.eat(&Tok::LBrace) {
            if self.peek() != Some(&Tok::RBrace) {
                loop {
                    conns.push(self.connection()?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect(Tok::RBrace)?;
        }

        let term = self.term()?;
        self.expect(Tok::Colon)?;
        let ty = self.ty()?;
        self.expect_end()?;

        infer_sequent(context, conns, TypedTerm::new(term, ty))
    }

    fn connection(&mut self) -> Result<RawConn> {
        let left = self.term()?;
        let ty = if self.eat(&Tok::ColonBracket) {
            let t = self.ty()?;
            self.expect(Tok::RBracket)?;
            Some(t)
        } else {
            self.expect(Tok::Colon)?;
            None
        };
        let right = self.term()?;
        Ok(RawConn { left, right, ty })
    }
}

/// Synthesize the type of a term from the bindings seen so far; `None`
/// when some leaf is still unknown.
fn synth(
    term: &Term,
    vars: &BTreeMap<String, Ty>,
    consts: &BTreeMap<String, Ty>,
) -> Option<Ty> {
    match term {
        Term::Var(name) => vars.get(name).cloned(),
        Term::Const(name) => consts.get(name).cloned(),
        Term::One | Term::Dim(_) | Term::Product(_) => Some(Ty::Unit),
        Term::Star(inner) => synth(inner, vars, consts).map(|t| t.negate()),
        Term::Tensor(l, r) => {
            let lt = synth(l, vars, consts)?;
            let rt = synth(r, vars, consts)?;
            Some(Ty::tensor(lt, rt))
        }
    }
}

/// A term's type viewed as a pattern: leaves whose binder is still
/// unknown become pattern variables, negation stays symbolic until it can
/// be pushed onto something known.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Pat {
    Known(Ty),
    /// An unbound leaf; `true` marks a constant name, `false` a variable.
    Open(bool, String),
    Neg(Box<Pat>),
    Tensor(Box<Pat>, Box<Pat>),
}

fn pattern(
    term: &Term,
    vars: &BTreeMap<String, Ty>,
    consts: &BTreeMap<String, Ty>,
) -> Pat {
    match term {
        Term::Var(name) => match vars.get(name) {
            Some(ty) => Pat::Known(ty.clone()),
            None => Pat::Open(false, name.clone()),
        },
        Term::Const(name) => match consts.get(name) {
            Some(ty) => Pat::Known(ty.clone()),
            None => Pat::Open(true, name.clone()),
        },
        Term::One | Term::Dim(_) | Term::Product(_) => Pat::Known(Ty::Unit),
        Term::Star(inner) => negate_pat(pattern(inner, vars, consts)),
        Term::Tensor(l, r) => Pat::Tensor(
            Box::new(pattern(l, vars, consts)),
            Box::new(pattern(r, vars, consts)),
        ),
    }
}

fn negate_pat(p: Pat) -> Pat {
    match p {
        Pat::Known(ty) => Pat::Known(ty.negate()),
        Pat::Neg(inner) => *inner,
        Pat::Tensor(l, r) => Pat::Tensor(Box::new(negate_pat(*r)), Box::new(negate_pat(*l))),
        open @ Pat::Open(..) => Pat::Neg(Box::new(open)),
    }
}

/// Unify the shapes of a connection's two sides, binding what becomes
/// ground.  Pairs that stay underdetermined are skipped without error;
/// the caller loops until nothing more resolves.
fn unify_pats(
    a: &Pat,
    b: &Pat,
    vars: &mut BTreeMap<String, Ty>,
    consts: &mut BTreeMap<String, Ty>,
) {
    let a = resolve_pat(a, vars, consts);
    let b = resolve_pat(b, vars, consts);
    match (&a, &b) {
        (Pat::Open(is_const, name), Pat::Known(ty))
        | (Pat::Known(ty), Pat::Open(is_const, name)) => {
            let map = if *is_const { consts } else { vars };
            map.entry(name.clone()).or_insert_with(|| ty.clone());
        }
        // Two unknown leaves (possibly negated) carry no information, and
        // must not bounce negation back and forth.
        (Pat::Open(..) | Pat::Neg(_), Pat::Open(..) | Pat::Neg(_)) => {}
        (Pat::Neg(inner), other) | (other, Pat::Neg(inner)) => {
            let flipped = negate_pat(other.clone());
            unify_pats(inner, &flipped, vars, consts);
        }
        (Pat::Tensor(al, ar), Pat::Tensor(bl, br)) => {
            unify_pats(al, bl, vars, consts);
            unify_pats(ar, br, vars, consts);
        }
        (Pat::Tensor(al, ar), Pat::Known(Ty::Tensor(bl, br)))
        | (Pat::Known(Ty::Tensor(bl, br)), Pat::Tensor(al, ar)) => {
            unify_pats(al, &Pat::Known((**bl).clone()), vars, consts);
            unify_pats(ar, &Pat::Known((**br).clone()), vars, consts);
        }
        // Open-vs-open, shape clashes, and ground pairs carry no new
        // bindings here; validation reports clashes later.
        _ => {}
    }
}

fn resolve_pat(
    p: &Pat,
    vars: &BTreeMap<String, Ty>,
    consts: &BTreeMap<String, Ty>,
) -> Pat {
    match p {
        Pat::Open(true, name) => match consts.get(name) {
            Some(ty) => Pat::Known(ty.clone()),
            None => p.clone(),
        },
        Pat::Open(false, name) => match vars.get(name) {
            Some(ty) => Pat::Known(ty.clone()),
            None => p.clone(),
        },
        Pat::Neg(inner) => negate_pat(resolve_pat(inner, vars, consts)),
        Pat::Tensor(l, r) => {
            let (l, r) = (resolve_pat(l, vars, consts), resolve_pat(r, vars, consts));
            if let (Pat::Known(lt), Pat::Known(rt)) = (&l, &r) {
                Pat::Known(Ty::tensor(lt.clone(), rt.clone()))
            } else {
                Pat::Tensor(Box::new(l), Box::new(r))
            }
        }
        Pat::Known(_) => p.clone(),
    }
}

/// Determine the types of unannotated connections by fixpoint propagation
/// from annotated positions and already-resolved connections, then build
/// the validated sequent.  Both sides of a connection share its type, so
/// each pass also unifies the two sides' shapes, which pins variables
/// that occur nowhere else (e.g. `{(x1 @ x2^) : (x4 @ x4^)}` resolves
/// `x4` against `x1` and then `x2` against `x4`).
fn infer_sequent(
    context: Vec<TypedTerm>,
    conns: Vec<RawConn>,
    conclusion: TypedTerm,
) -> Result<Sequent> {
    let mut vars = BTreeMap::new();
    let mut consts = BTreeMap::new();
    for entry in &context {
        check_term(&entry.term, &entry.ty, &mut vars, &mut consts)?;
    }
    check_term(&conclusion.term, &conclusion.ty, &mut vars, &mut consts)?;

    let mut resolved: Vec<Connection> = Vec::new();
    let mut pending: Vec<RawConn> = Vec::new();
    for conn in conns {
        match conn.ty {
            Some(ty) => {
                check_term(&conn.left, &ty, &mut vars, &mut consts)?;
                check_term(&conn.right, &ty, &mut vars, &mut consts)?;
                resolved.push(Connection::new(conn.left, conn.right, ty));
            }
            None => pending.push(conn),
        }
    }

    while !pending.is_empty() {
        let mut progressed = false;
        let mut still = Vec::new();
        for conn in pending {
            let before = (vars.len(), consts.len());
            let lp = pattern(&conn.left, &vars, &consts);
            let rp = pattern(&conn.right, &vars, &consts);
            unify_pats(&lp, &rp, &mut vars, &mut consts);
            if (vars.len(), consts.len()) != before {
                progressed = true;
            }
            let ty = synth(&conn.left, &vars, &consts)
                .or_else(|| synth(&conn.right, &vars, &consts));
            match ty {
                Some(ty) => {
                    check_term(&conn.left, &ty, &mut vars, &mut consts)?;
                    check_term(&conn.right, &ty, &mut vars, &mut consts)?;
                    resolved.push(Connection::new(conn.left, conn.right, ty));
                    progressed = true;
                }
                None => still.push(conn),
            }
        }
        pending = still;
        if !progressed {
            let c = &pending[0];
            return Err(Error::Type(format!(
                "cannot infer the type of connection `{} : {}`; annotate it as `{} :[T] {}`",
                c.left, c.right, c.left, c.right
            )));
        }
    }

    Sequent::new(context, Soup::from_connections(resolved), conclusion)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_types_with_precedence() {
        assert_eq!(parse_type("I").unwrap(), Ty::Unit);
        assert_eq!(parse_type("A^").unwrap(), Ty::atom("A").negate());
        assert_eq!(
            parse_type("A^ @ B @ C").unwrap(),
            Ty::tensor(
                Ty::tensor(Ty::atom("A").negate(), Ty::atom("B")),
                Ty::atom("C")
            )
        );
        // Postfix on a parenthesized tensor normalizes by De Morgan.
        assert_eq!(
            parse_type("(A @ B)^").unwrap(),
            Ty::tensor(Ty::atom("B").negate(), Ty::atom("A").negate())
        );
        assert_eq!(parse_type("I^").unwrap(), Ty::Unit);
        assert_eq!(parse_type("A^^").unwrap(), Ty::atom("A"));
    }

    #[test]
    fn parses_terms_with_precedence() {
        assert_eq!(parse_term("1").unwrap(), Term::One);
        assert_eq!(parse_term("#f").unwrap(), Term::konst("f"));
        assert_eq!(
            parse_term("x . y @ z").unwrap(),
            Term::tensor(
                Term::product(vec![Term::var("x"), Term::var("y")]),
                Term::var("z")
            )
        );
        assert_eq!(
            parse_term("(x @ y)^").unwrap(),
            Term::tensor(Term::var("y").negate(), Term::var("x").negate())
        );
        assert_eq!(
            parse_term("D[A @ I]").unwrap(),
            Term::Dim(Ty::atom("A")),
            "dimension of a tensor splits eagerly and drops the unit"
        );
        assert_eq!(parse_term("D[B]^").unwrap(), Term::Dim(Ty::atom("B")));
        // `D` alone is an ordinary variable; only `D[` is a dimension.
        assert_eq!(parse_term("D").unwrap(), Term::var("D"));
    }

    #[test]
    fn parses_identity_sequent() {
        let s = parse_sequent("x:A |- x:A").unwrap();
        assert_eq!(s.context().len(), 1);
        assert!(s.soup().is_empty());
        assert_eq!(s.to_string(), "x:A |- x:A");
    }

    #[test]
    fn infers_connection_types_from_context() {
        let s = parse_sequent("t1:A |- { t1 : t2 } t2:A").unwrap();
        let conn = s.soup().iter().next().unwrap();
        assert_eq!(conn.ty(), &Ty::atom("A"));
    }

    #[test]
    fn annotation_required_for_isolated_connections() {
        let err = parse_sequent("t1:A |- { t1:t2, x:x } t2:A").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains(":[T]"), "{msg}");
        let ok = parse_sequent("t1:A |- { t1:t2, x :[B] x } t2:A").unwrap();
        assert_eq!(ok.soup().len(), 2);
    }

    #[test]
    fn propagation_chains_through_connections() {
        // y's type comes from x, then z's from y.
        let s = parse_sequent("x:A |- { x:y, y^:z } z^:A").unwrap();
        let vt = s.var_types().unwrap();
        assert_eq!(vt["z"], Ty::atom("A").negate());
    }

    #[test]
    fn empty_context_and_soup_forms() {
        assert!(parse_sequent("|- 1:I").is_ok());
        assert!(parse_sequent("|- { } 1:I").is_ok());
        assert!(parse_sequent("|- {} 1:I").is_ok());
        let s = parse_sequent("|- { D[C] : 1 } 1:I").unwrap();
        assert_eq!(s.soup().len(), 1);
    }

    #[test]
    fn scalar_products_and_dims_parse_at_unit() {
        let s = parse_sequent("|- { #m . #n : 1, D[A @ B] : 1 } 1:I").unwrap();
        assert_eq!(s.soup().len(), 2);
    }

    #[test]
    fn files_skip_comments_and_blanks() {
        let text = "\
# a comment line
x:A |- x:A

  # indented comment
|- 1:I
";
        let seqs = parse_sequents(text).unwrap();
        assert_eq!(seqs.len(), 2);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "x:A |- x:A\ny:B |- z:B\n";
        let err = parse_sequents(text).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn leading_constant_context_round_trips() {
        // Printed with defensive parentheses so the line is not a comment.
        let s = parse_sequent("(#c):A |- { #c^ : y } y^:A").unwrap();
        let printed = s.to_string();
        assert!(!printed.starts_with('#'), "{printed}");
        let back = parse_sequent(&printed).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn round_trips_on_printed_forms() {
        let cases = [
            "x:A |- x:A",
            "t1:A |- { t1 :[A] t2, x :[B] x, 1 :[I] D[C] } t2:A",
            "|- { 1 :[I] #m . #n } 1:I",
            "g:(A @ B) |- g:(A @ B)",
            "|- (x1^ @ x1):(A^ @ A)",
        ];
        for src in cases {
            let s = parse_sequent(src).unwrap();
            let printed = s.to_string();
            let back = parse_sequent(&printed).unwrap();
            assert_eq!(back, s, "{src} -> {printed}");
        }
    }
}
