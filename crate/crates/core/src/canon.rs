//! Canonical forms and alpha-equivalence.
//!
//! Alpha-renaming here is richer than bare variable renaming: a variable of
//! tensor type may be renamed to a *bundle* — a fresh tensor of variables
//! mirroring the type tree — and conversely.  Canonicalization therefore
//! proceeds in two phases:
//!
//! 1. **Expansion.** Every variable of tensor type is replaced (at both of
//!    its occurrences) by a bundle of fresh variables, one per leaf of its
//!    type tree.  After this phase every variable has an atomic, dual
//!    atomic, or unit type, which makes renaming ordinary again.
//! 2. **Renaming search.** Variables are renamed to `v1, v2, ...` in
//!    traversal order: context left to right, then the conclusion, then the
//!    soup.  Because a variable may be renamed to a *starred* fresh
//!    variable (`x ↦ y^` is a bundle of the same type), leaf polarity is
//!    not observable either: each variable absorbs a star flip so that its
//!    first occurrence prints plain.  The soup is a multiset and each
//!    connection can be presented in two congruent orientations, so the
//!    traversal order of the soup is not given — the search greedily emits
//!    the lexicographically least serialized connection next, backtracking
//!    across ties that assign different names.
//!
//! Two sequents are alpha-equivalent exactly when their canonical forms are
//! structurally equal.

use crate::error::{Error, Result};
use crate::sequent::{Connection, Sequent, Soup, TypedTerm};
use crate::term::Term;
use crate::types::Ty;
use std::collections::BTreeMap;

/// Hard cap on renaming-search nodes; hitting it means a soup with a
/// pathological automorphism group, far beyond anything the rules produce.
const SEARCH_NODE_CAP: usize = 1_000_000;

/// Rewrite `seq` to its canonical representative.  Two sequents have equal
/// canonical forms iff they are alpha-equivalent.
pub fn canonicalize(seq: &Sequent) -> Result<Sequent> {
    let expanded = expand_bundles(seq)?;
    rename_minimal(&expanded)
}

/// Alpha-equivalence, decided via canonical forms.
pub fn alpha_equiv(a: &Sequent, b: &Sequent) -> Result<bool> {
    // Cheap well-typedness-preserved discriminators first.
    if a.context().len() != b.context().len()
        || a.soup().len() != b.soup().len()
        || a.conclusion().ty != b.conclusion().ty
    {
        return Ok(false);
    }
    if a.context()
        .iter()
        .zip(b.context())
        .any(|(x, y)| x.ty != y.ty)
    {
        return Ok(false);
    }
    Ok(canonicalize(a)? == canonicalize(b)?)
}

/// A fresh tensor of variables mirroring `ty`'s tree; each leaf slot gets
/// its own variable typed at that slot (unit leaves get unit variables).
fn bundle_term(ty: &Ty, next: &mut u32) -> Term {
    match ty {
        Ty::Tensor(l, r) => {
            let lt = bundle_term(l, next);
            let rt = bundle_term(r, next);
            Term::tensor(lt, rt)
        }
        _ => {
            // Interim names carry a NUL byte so they cannot collide with
            // parsed identifiers; the renaming phase replaces them anyway.
            let name = format!("\u{0}b{}", *next);
            *next += 1;
            Term::var(name)
        }
    }
}

/// Phase 1: replace every tensor-typed variable by a bundle of fresh
/// variables at both occurrences (the starred occurrence receives the
/// negated bundle via the substitution rules).
fn expand_bundles(seq: &Sequent) -> Result<Sequent> {
    let var_types = seq.var_types()?;
    let mut next = 0u32;
    let mut subst: Vec<(String, Term)> = Vec::new();
    for (name, ty) in &var_types {
        if matches!(ty, Ty::Tensor(..)) {
            subst.push((name.clone(), bundle_term(ty, &mut next)));
        }
    }
    if subst.is_empty() {
        return Ok(seq.clone());
    }
    let apply = |t: &Term| -> Term {
        let mut out = t.clone();
        for (name, repl) in &subst {
            out = out.subst_var(name, repl);
        }
        out
    };
    let context = seq
        .context()
        .iter()
        .map(|e| TypedTerm::new(apply(&e.term), e.ty.clone()))
        .collect();
    let soup = Soup::from_connections(
        seq.soup()
            .iter()
            .map(|c| Connection::new(apply(c.left()), apply(c.right()), c.ty().clone())),
    );
    let conclusion = TypedTerm::new(
        apply(&seq.conclusion().term),
        seq.conclusion().ty.clone(),
    );
    Sequent::new(context, soup, conclusion)
}

/// Partial renaming state: original name -> canonical `v{k}` name plus a
/// star-flip bit (true when the original's occurrences have their polarity
/// flipped, i.e. the variable was renamed to a starred fresh variable).
#[derive(Clone, Default)]
struct Rename {
    map: BTreeMap<String, (String, bool)>,
    next: u32,
}

impl Rename {
    /// Canonical name and flip for `var`, assigning the next index on first
    /// sight.  The flip is chosen so that the first-seen occurrence prints
    /// plain.  Newly assigned names are appended to `delta`.
    fn get(&mut self, var: &str, starred: bool, delta: &mut Vec<String>) -> (String, bool) {
        if let Some((n, flip)) = self.map.get(var) {
            return (n.clone(), *flip);
        }
        let name = format!("v{}", self.next);
        self.next += 1;
        self.map.insert(var.to_string(), (name.clone(), starred));
        delta.push(var.to_string());
        (name, starred)
    }

    fn rollback(&mut self, delta: &[String]) {
        for var in delta {
            self.map.remove(var);
        }
        self.next -= delta.len() as u32;
    }
}

/// Serialize a term under the partial renaming, assigning fresh canonical
/// names to first-seen variables in traversal order.
fn ser_term(t: &Term, rename: &mut Rename, delta: &mut Vec<String>, out: &mut String) {
    match t {
        Term::Var(name) => {
            let (n, flip) = rename.get(name, false, delta);
            out.push_str(&n);
            if flip {
                out.push('^');
            }
        }
        Term::Const(name) => {
            out.push('#');
            out.push_str(name);
        }
        Term::One => out.push('1'),
        Term::Dim(ty) => {
            out.push_str("D[");
            out.push_str(&ty.to_string());
            out.push(']');
        }
        Term::Star(inner) => match &**inner {
            Term::Var(name) => {
                let (n, flip) = rename.get(name, true, delta);
                out.push_str(&n);
                if !flip {
                    out.push('^');
                }
            }
            other => {
                ser_term(other, rename, delta, out);
                out.push('^');
            }
        },
        Term::Tensor(l, r) => {
            out.push('(');
            ser_term(l, rename, delta, out);
            out.push('@');
            ser_term(r, rename, delta, out);
            out.push(')');
        }
        Term::Product(fs) => {
            out.push('(');
            for (i, f) in fs.iter().enumerate() {
                if i > 0 {
                    out.push('.');
                }
                ser_term(f, rename, delta, out);
            }
            out.push(')');
        }
    }
}

/// Rebuild a term under the finished renaming: simultaneous variable
/// renaming where flipped variables land starred (and doubly starred
/// occurrences collapse).
fn rebuild_term(t: &Term, map: &BTreeMap<String, (String, bool)>) -> Term {
    match t {
        Term::Var(name) => match map.get(name) {
            Some((n, false)) => Term::var(n.clone()),
            Some((n, true)) => Term::var(n.clone()).negate(),
            None => t.clone(),
        },
        Term::Star(inner) => rebuild_term(inner, map).negate(),
        Term::Tensor(l, r) => Term::tensor(rebuild_term(l, map), rebuild_term(r, map)),
        Term::Product(fs) => Term::product(fs.iter().map(|f| rebuild_term(f, map)).collect()),
        Term::Const(_) | Term::One | Term::Dim(_) => t.clone(),
    }
}

/// One orientation of one soup connection, as candidate output.
#[derive(Clone)]
struct Presentation {
    left: Term,
    right: Term,
    ty: Ty,
}

impl Presentation {
    fn serialize(&self, rename: &mut Rename, delta: &mut Vec<String>) -> String {
        let mut s = String::new();
        ser_term(&self.left, rename, delta, &mut s);
        s.push_str(":[");
        s.push_str(&self.ty.to_string());
        s.push(']');
        ser_term(&self.right, rename, delta, &mut s);
        s
    }
}

struct Search {
    /// Per original connection: its one or two distinct presentations.
    items: Vec<Vec<Presentation>>,
    best: Option<(String, Vec<Presentation>, Rename)>,
    nodes: usize,
}

impl Search {
    /// Explore orderings/orientations, always emitting a lexicographically
    /// least next block and branching over ties that differ in naming.
    fn run(
        &mut self,
        used: &mut Vec<bool>,
        rename: &mut Rename,
        acc: &mut String,
        chosen: &mut Vec<Presentation>,
    ) -> Result<()> {
        self.nodes += 1;
        if self.nodes > SEARCH_NODE_CAP {
            return Err(Error::CapExceeded(
                "canonical renaming search exceeded its node cap".into(),
            ));
        }
        if chosen.len() == self.items.len() {
            let better = match &self.best {
                None => true,
                Some((key, _, _)) => acc.as_str() < key.as_str(),
            };
            if better {
                self.best = Some((acc.clone(), chosen.clone(), rename.clone()));
            }
            return Ok(());
        }

        // Evaluate every unused candidate under the current renaming.
        let mut evaluated: Vec<(String, Vec<String>, usize, usize)> = Vec::new();
        for (i, presentations) in self.items.iter().enumerate() {
            if used[i] {
                continue;
            }
            for (j, p) in presentations.iter().enumerate() {
                let mut delta = Vec::new();
                let block = p.serialize(rename, &mut delta);
                rename.rollback(&delta);
                evaluated.push((block, delta, i, j));
            }
        }
        let min_block = evaluated
            .iter()
            .map(|(b, _, _, _)| b.clone())
            .min()
            .expect("nonempty candidate set");

        // Among minimal blocks, identical (block, delta) pairs are fully
        // interchangeable; recurse once per distinct naming effect.
        let mut candidates: Vec<(Vec<String>, usize, usize)> = Vec::new();
        for (block, delta, i, j) in evaluated {
            if block != min_block {
                continue;
            }
            if candidates.iter().any(|(d, _, _)| *d == delta) {
                continue;
            }
            candidates.push((delta, i, j));
        }

        for (_, i, j) in candidates {
            let p = self.items[i][j].clone();
            used[i] = true;
            let mut delta = Vec::new();
            let block = p.serialize(rename, &mut delta);
            debug_assert_eq!(block, min_block);
            let acc_len = acc.len();
            acc.push('\u{0}');
            acc.push_str(&block);
            chosen.push(p);

            self.run(used, rename, acc, chosen)?;

            chosen.pop();
            acc.truncate(acc_len);
            rename.rollback(&delta);
            used[i] = false;
        }
        Ok(())
    }
}

/// Phase 2: find the minimal renaming/orientation/order and rebuild the
/// sequent with variables `v1, v2, ...`.
fn rename_minimal(seq: &Sequent) -> Result<Sequent> {
    let mut rename = Rename { map: BTreeMap::new(), next: 1 };
    let mut prefix_delta = Vec::new();
    let mut prefix = String::new();
    for entry in seq.context() {
        ser_term(&entry.term, &mut rename, &mut prefix_delta, &mut prefix);
        prefix.push(':');
        prefix.push_str(&entry.ty.to_string());
        prefix.push('\u{0}');
    }
    ser_term(
        &seq.conclusion().term,
        &mut rename,
        &mut prefix_delta,
        &mut prefix,
    );

    let items: Vec<Vec<Presentation>> = seq
        .soup()
        .iter()
        .map(|c| {
            let direct = Presentation {
                left: c.left().clone(),
                right: c.right().clone(),
                ty: c.ty().clone(),
            };
            let (fl, fr, fty) = c.flipped_parts();
            let flipped = Presentation { left: fl, right: fr, ty: fty };
            if fl_eq(&direct, &flipped) {
                vec![direct]
            } else {
                vec![direct, flipped]
            }
        })
        .collect();

    let mut search = Search { items, best: None, nodes: 0 };
    let mut used = vec![false; search.items.len()];
    let mut acc = prefix;
    let mut chosen = Vec::new();
    search.run(&mut used, &mut rename, &mut acc, &mut chosen)?;
    let (_, chosen, rename) = search.best.take().expect("search always yields a leaf");

    let map = rename.map;
    let context = seq
        .context()
        .iter()
        .map(|e| TypedTerm::new(rebuild_term(&e.term, &map), e.ty.clone()))
        .collect();
    let conclusion = TypedTerm::new(
        rebuild_term(&seq.conclusion().term, &map),
        seq.conclusion().ty.clone(),
    );
    let soup = Soup::from_connections(chosen.iter().map(|p| {
        Connection::new(
            rebuild_term(&p.left, &map),
            rebuild_term(&p.right, &map),
            p.ty.clone(),
        )
    }));
    Sequent::from_parts(context, soup, conclusion, rename.next)
}

fn fl_eq(a: &Presentation, b: &Presentation) -> bool {
    a.left == b.left && a.right == b.right && a.ty == b.ty
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Ty {
        Ty::atom("A")
    }
    fn b() -> Ty {
        Ty::atom("B")
    }
    fn tt(term: Term, ty: Ty) -> TypedTerm {
        TypedTerm::new(term, ty)
    }

    #[test]
    fn identity_renames_to_v1() {
        let seq = Sequent::new(
            vec![tt(Term::var("x17"), a())],
            Soup::new(),
            tt(Term::var("x17"), a()),
        )
        .unwrap();
        let canon = canonicalize(&seq).unwrap();
        assert_eq!(canon.to_string(), "v1:A |- v1:A");
    }

    #[test]
    fn renaming_is_invisible() {
        let mk = |x: &str, y: &str| {
            Sequent::new(
                vec![tt(Term::var(x), a())],
                Soup::from_connections(vec![Connection::new(
                    Term::var(x),
                    Term::var(y),
                    a(),
                )]),
                tt(Term::var(y), a()),
            )
            .unwrap()
        };
        assert!(alpha_equiv(&mk("x", "y"), &mk("p", "q")).unwrap());
        assert!(alpha_equiv(&mk("x", "y"), &mk("y", "x")).unwrap());
    }

    /// A tensor-typed variable is interchangeable with a bundle of fresh
    /// atomic variables: `|- (g^ @ g)` vs `|- ((x2^ @ x1^) @ (x1 @ x2))`.
    #[test]
    fn bundle_renaming_identifies_var_with_expansion() {
        let gty = Ty::tensor(a(), b());
        let closed_var = Sequent::new(
            vec![],
            Soup::new(),
            tt(
                Term::tensor(Term::var("g").negate(), Term::var("g")),
                Ty::tensor(gty.negate(), gty.clone()),
            ),
        )
        .unwrap();
        let bundle = Term::tensor(Term::var("x1"), Term::var("x2"));
        let closed_bundle = Sequent::new(
            vec![],
            Soup::new(),
            tt(
                Term::tensor(bundle.negate(), bundle.clone()),
                Ty::tensor(gty.negate(), gty.clone()),
            ),
        )
        .unwrap();
        assert!(alpha_equiv(&closed_var, &closed_bundle).unwrap());
    }

    /// `(x^ @ x)` with `x:A` and `(y @ y^)` with `y:A^` are alpha-equivalent:
    /// `x ↦ y^` is a legitimate renaming (a one-variable bundle of type A),
    /// so leaf polarity is invisible.
    #[test]
    fn dual_typed_variable_polarity_is_invisible() {
        let s1 = Sequent::new(
            vec![],
            Soup::new(),
            tt(
                Term::tensor(Term::var("x").negate(), Term::var("x")),
                Ty::tensor(a().negate(), a()),
            ),
        )
        .unwrap();
        let s2 = Sequent::new(
            vec![],
            Soup::new(),
            tt(
                Term::tensor(Term::var("y"), Term::var("y").negate()),
                Ty::tensor(a().negate(), a()),
            ),
        )
        .unwrap();
        assert!(alpha_equiv(&s1, &s2).unwrap());
        // Distinct polarity *patterns* still separate: (x^ @ x) vs (y @ y).
        let s3 = Sequent::new(
            vec![],
            Soup::new(),
            tt(
                Term::tensor(Term::var("p"), Term::var("q")),
                Ty::tensor(a().negate(), a()),
            ),
        );
        // p:A^ and q:A are unrelated variables; such a sequent is not even
        // linear, so the comparison cannot arise.
        assert!(s3.is_err());
    }

    #[test]
    fn orientation_of_connections_is_invisible() {
        let s1 = Sequent::new(
            vec![tt(Term::var("x"), a())],
            Soup::from_connections(vec![Connection::new(
                Term::var("x"),
                Term::var("y"),
                a(),
            )]),
            tt(Term::var("y"), a()),
        )
        .unwrap();
        let s2 = Sequent::new(
            vec![tt(Term::var("x"), a())],
            Soup::from_connections(vec![Connection::new(
                Term::var("y").negate(),
                Term::var("x").negate(),
                a().negate(),
            )]),
            tt(Term::var("y"), a()),
        )
        .unwrap();
        assert!(alpha_equiv(&s1, &s2).unwrap());
    }

    /// Soup ordering with symmetric blocks requires backtracking: both
    /// connections serialize identically until their second variables are
    /// tied to the conclusion.
    #[test]
    fn tied_soup_blocks_backtrack() {
        let mk = |swap: bool| {
            let c1 = Connection::new(Term::var("p"), Term::var("q"), a());
            let c2 = Connection::new(Term::var("r"), Term::var("s"), a());
            let conns = if swap { vec![c2, c1] } else { vec![c1, c2] };
            Sequent::new(
                vec![tt(Term::var("p"), a()), tt(Term::var("r"), a())],
                Soup::from_connections(conns),
                tt(
                    Term::tensor(Term::var("q"), Term::var("s")),
                    Ty::tensor(a(), a()),
                ),
            )
            .unwrap()
        };
        assert!(alpha_equiv(&mk(false), &mk(true)).unwrap());
    }

    #[test]
    fn canonicalize_is_idempotent_on_samples() {
        let gty = Ty::tensor(a(), b());
        let samples = vec![
            Sequent::new(
                vec![tt(Term::var("x"), gty.clone())],
                Soup::from_connections(vec![Connection::new(
                    Term::var("z"),
                    Term::var("z"),
                    b(),
                )]),
                tt(Term::var("x"), gty.clone()),
            )
            .unwrap(),
            Sequent::new(
                vec![],
                Soup::from_connections(vec![
                    Connection::new(Term::One, Term::One, Ty::Unit),
                    Connection::new(Term::dim(a()), Term::One, Ty::Unit),
                ]),
                tt(Term::One, Ty::Unit),
            )
            .unwrap(),
        ];
        for s in samples {
            let c1 = canonicalize(&s).unwrap();
            let c2 = canonicalize(&c1).unwrap();
            assert_eq!(c1, c2, "idempotence on {s}");
        }
    }

    #[test]
    fn distinct_structure_stays_distinct() {
        let s1 = Sequent::new(
            vec![tt(Term::var("x"), a())],
            Soup::new(),
            tt(Term::var("x"), a()),
        )
        .unwrap();
        let s2 = Sequent::new(
            vec![tt(Term::var("x"), a())],
            Soup::from_connections(vec![Connection::new(
                Term::var("x"),
                Term::var("y"),
                a(),
            )]),
            tt(Term::var("y"), a()),
        )
        .unwrap();
        assert!(!alpha_equiv(&s1, &s2).unwrap());
    }
}
