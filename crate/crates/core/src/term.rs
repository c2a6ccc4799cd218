//! Terms: variables, named constants, the scalar `1`, dimension constants,
//! stars, tensors, and scalar products.
//!
//! Like types, terms live in star-normal form: `Star` wraps only a variable
//! or a named constant.  Negating a composite pushes the star inward,
//! reversing tensor factors (`(a @ b)^ = b^ @ a^`) and mapping each product
//! factor (`(m . n)^ = m^ . n^`); `1^ = 1` and `D[T]^ = D[T]`.
//!
//! Scalar products are kept flat: a `Product` node holds at least two
//! factors, none of which is itself a product or `1`.  The [`Term::dim`]
//! constructor splits dimension constants over tensor types eagerly
//! (`D[(A @ B)] = D[A] . D[B]`, `D[I] = 1`), so a stored `Dim` always
//! carries an atomic or dual-atomic type.

use crate::types::Ty;
use std::collections::BTreeMap;
use std::fmt;

/// A term in star-normal form.  Build via the smart constructors to keep
/// the invariants listed in the module docs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// A variable.
    Var(String),
    /// A named constant, printed `#name`.
    Const(String),
    /// The scalar constant `1` of type `I`.
    One,
    /// The dimension constant of an atomic (or dual-atomic) type, `D[T]`.
    Dim(Ty),
    /// Star (linear negation) of a variable or constant.
    Star(Box<Term>),
    /// Tensor pair, printed `(l @ r)`.
    Tensor(Box<Term>, Box<Term>),
    /// Flat scalar product with >= 2 factors, printed `(f1 . f2 . ...)`.
    Product(Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn konst(name: impl Into<String>) -> Term {
        Term::Const(name.into())
    }

    pub fn tensor(left: Term, right: Term) -> Term {
        Term::Tensor(Box::new(left), Box::new(right))
    }

    /// Dimension constant, eagerly split across tensors: `D[(A @ B)]`
    /// becomes `D[A] . D[B]` and `D[I]` collapses to `1`, so that equal
    /// scalars share one representation.
    pub fn dim(ty: Ty) -> Term {
        match ty {
            Ty::Unit => Term::One,
            Ty::Tensor(l, r) => Term::product(vec![Term::dim(*l), Term::dim(*r)]),
            atomic => Term::Dim(atomic),
        }
    }

    /// Flat scalar product.  Drops `1` factors, splices nested products,
    /// returns `1` for an empty list and the factor itself for a singleton.
    pub fn product(factors: Vec<Term>) -> Term {
        let mut flat = Vec::new();
        for f in factors {
            match f {
                Term::One => {}
                Term::Product(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Term::One,
            1 => flat.pop().unwrap(),
            _ => Term::Product(flat),
        }
    }

    /// Star-normal negation (an involution).
    pub fn negate(&self) -> Term {
        match self {
            Term::Var(_) | Term::Const(_) => Term::Star(Box::new(self.clone())),
            Term::One => Term::One,
            Term::Dim(ty) => Term::Dim(ty.clone()),
            Term::Star(inner) => (**inner).clone(),
            Term::Tensor(l, r) => Term::tensor(r.negate(), l.negate()),
            Term::Product(fs) => Term::Product(fs.iter().map(Term::negate).collect()),
        }
    }

    /// True when every `Star` wraps a variable or constant and every
    /// `Product`/`Dim` obeys the flattening invariants.
    pub fn is_star_normal(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) | Term::One => true,
            Term::Dim(ty) => {
                ty.is_star_normal() && !matches!(ty, Ty::Tensor(..) | Ty::Unit)
            }
            Term::Star(inner) => matches!(**inner, Term::Var(_) | Term::Const(_)),
            Term::Tensor(l, r) => l.is_star_normal() && r.is_star_normal(),
            Term::Product(fs) => {
                fs.len() >= 2
                    && fs
                        .iter()
                        .all(|f| !matches!(f, Term::One | Term::Product(_)) && f.is_star_normal())
            }
        }
    }

    /// True when the term mentions no constant (`#c`, `1`, or `D[..]` all
    /// count as constants; only variables and their stars are allowed).
    pub fn is_constant_free(&self) -> bool {
        match self {
            Term::Var(_) => true,
            Term::Const(_) | Term::One | Term::Dim(_) => false,
            Term::Star(inner) => inner.is_constant_free(),
            Term::Tensor(l, r) => l.is_constant_free() && r.is_constant_free(),
            Term::Product(fs) => fs.iter().all(Term::is_constant_free),
        }
    }

    /// `Some((name, starred))` when the term is a bare variable or its star.
    pub fn as_var(&self) -> Option<(&str, bool)> {
        match self {
            Term::Var(name) => Some((name, false)),
            Term::Star(inner) => match &**inner {
                Term::Var(name) => Some((name, true)),
                _ => None,
            },
            _ => None,
        }
    }

    /// Add each variable occurrence (bare or starred) to `counts`.
    pub fn count_vars(&self, counts: &mut BTreeMap<String, usize>) {
        match self {
            Term::Var(name) => *counts.entry(name.clone()).or_insert(0) += 1,
            Term::Const(_) | Term::One | Term::Dim(_) => {}
            Term::Star(inner) => inner.count_vars(counts),
            Term::Tensor(l, r) => {
                l.count_vars(counts);
                r.count_vars(counts);
            }
            Term::Product(fs) => fs.iter().for_each(|f| f.count_vars(counts)),
        }
    }

    /// Number of occurrences of variable `x` in this term.
    pub fn var_occurrences(&self, x: &str) -> usize {
        match self {
            Term::Var(name) => (name == x) as usize,
            Term::Const(_) | Term::One | Term::Dim(_) => 0,
            Term::Star(inner) => inner.var_occurrences(x),
            Term::Tensor(l, r) => l.var_occurrences(x) + r.var_occurrences(x),
            Term::Product(fs) => fs.iter().map(|f| f.var_occurrences(x)).sum(),
        }
    }

    /// Substitute `repl` for variable `x`: `x ↦ repl`, `x^ ↦ repl^`.
    pub fn subst_var(&self, x: &str, repl: &Term) -> Term {
        match self {
            Term::Var(name) if name == x => repl.clone(),
            Term::Star(inner) => match &**inner {
                Term::Var(name) if name == x => repl.negate(),
                _ => self.clone(),
            },
            Term::Tensor(l, r) => Term::tensor(l.subst_var(x, repl), r.subst_var(x, repl)),
            Term::Product(fs) => {
                Term::product(fs.iter().map(|f| f.subst_var(x, repl)).collect())
            }
            _ => self.clone(),
        }
    }

    /// Rename every variable through `map`, leaving unmapped names alone.
    pub fn rename_vars(&self, map: &BTreeMap<String, String>) -> Term {
        match self {
            Term::Var(name) => match map.get(name) {
                Some(new) => Term::var(new.clone()),
                None => self.clone(),
            },
            Term::Star(inner) => Term::Star(Box::new(inner.rename_vars(map))),
            Term::Tensor(l, r) => Term::tensor(l.rename_vars(map), r.rename_vars(map)),
            Term::Product(fs) => {
                Term::Product(fs.iter().map(|f| f.rename_vars(map)).collect())
            }
            _ => self.clone(),
        }
    }

    /// True when `needle` occurs as a (sub)term, compared structurally.
    pub fn contains_subterm(&self, needle: &Term) -> bool {
        if self == needle {
            return true;
        }
        match self {
            Term::Tensor(l, r) => l.contains_subterm(needle) || r.contains_subterm(needle),
            Term::Product(fs) => fs.iter().any(|f| f.contains_subterm(needle)),
            Term::Star(inner) => inner.contains_subterm(needle),
            _ => false,
        }
    }

    /// Replace the leftmost-outermost occurrence of `needle` by `repl`.
    /// Returns `None` when `needle` does not occur.
    pub fn replace_subterm_once(&self, needle: &Term, repl: &Term) -> Option<Term> {
        if self == needle {
            return Some(repl.clone());
        }
        match self {
            Term::Tensor(l, r) => {
                if let Some(l2) = l.replace_subterm_once(needle, repl) {
                    Some(Term::tensor(l2, (**r).clone()))
                } else {
                    r.replace_subterm_once(needle, repl)
                        .map(|r2| Term::tensor((**l).clone(), r2))
                }
            }
            Term::Product(fs) => {
                for (i, f) in fs.iter().enumerate() {
                    if let Some(f2) = f.replace_subterm_once(needle, repl) {
                        let mut out = fs.clone();
                        out[i] = f2;
                        return Some(Term::product(out));
                    }
                }
                None
            }
            _ => None,
        }
    }

    /// Leaf count: every `Var`, `Const`, `1`, and `D[..]` node counts one.
    pub fn leaf_count(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) | Term::One | Term::Dim(_) => 1,
            Term::Star(inner) => inner.leaf_count(),
            Term::Tensor(l, r) => l.leaf_count() + r.leaf_count(),
            Term::Product(fs) => fs.iter().map(Term::leaf_count).sum(),
        }
    }

    /// Total surplus of product factors (`len - 1` per product node),
    /// used by the normalization step bound.
    pub fn product_excess(&self) -> usize {
        match self {
            Term::Product(fs) => fs.len() - 1,
            Term::Tensor(l, r) => l.product_excess() + r.product_excess(),
            _ => 0,
        }
    }

    /// The product factors of a scalar term: `1` has none, a product has
    /// its list, and any other scalar term is a single factor.
    pub fn factors(&self) -> Vec<Term> {
        match self {
            Term::One => Vec::new(),
            Term::Product(fs) => fs.clone(),
            other => vec![other.clone()],
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(name) => write!(f, "{name}"),
            Term::Const(name) => write!(f, "#{name}"),
            Term::One => write!(f, "1"),
            Term::Dim(ty) => write!(f, "D[{ty}]"),
            Term::Star(inner) => write!(f, "{inner}^"),
            Term::Tensor(l, r) => write!(f, "({l} @ {r})"),
            Term::Product(fs) => {
                write!(f, "(")?;
                for (i, factor) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " . ")?;
                    }
                    write!(f, "{factor}")?;
                }
                write!(f, ")")
            }
        }
    }
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

    #[test]
    fn negation_reverses_tensor_factors() {
        let t = Term::tensor(Term::var("x"), Term::var("y"));
        assert_eq!(
            t.negate(),
            Term::tensor(Term::var("y").negate(), Term::var("x").negate())
        );
        assert_eq!(t.negate().negate(), t);
    }

    /// Exhaustive involution check over every star-normal term of depth <= 4
    /// built from two variables, one constant, `1`, and `D[A]`.
    #[test]
    fn negation_exhaustive_small_terms() {
        fn gen(depth: usize) -> Vec<Term> {
            let mut out = vec![
                Term::var("x"),
                Term::var("y"),
                Term::konst("c"),
                Term::One,
                Term::dim(a()),
                Term::var("x").negate(),
                Term::konst("c").negate(),
            ];
            if depth > 0 {
                let sub = gen(depth - 1);
                for l in &sub {
                    for r in &sub {
                        if l.leaf_count() + r.leaf_count() <= 4 {
                            out.push(Term::tensor(l.clone(), r.clone()));
                        }
                    }
                }
                out.push(Term::product(vec![Term::dim(a()), Term::konst("c")]));
                out.push(Term::product(vec![
                    Term::var("x").negate(),
                    Term::var("y"),
                ]));
            }
            out.sort();
            out.dedup();
            out
        }
        let all = gen(2);
        assert!(all.len() > 200, "expected a rich sample, got {}", all.len());
        for t in &all {
            assert!(t.is_star_normal(), "not star-normal: {t}");
            assert_eq!(&t.negate().negate(), t, "double negation of {t}");
            assert!(t.negate().is_star_normal());
        }
    }

    #[test]
    fn dim_splits_eagerly() {
        assert_eq!(Term::dim(Ty::Unit), Term::One);
        assert_eq!(
            Term::dim(Ty::tensor(a(), b())),
            Term::product(vec![Term::Dim(a()), Term::Dim(b())])
        );
        // D[((A @ I) @ B^)] = D[A] . D[B^]
        let t = Term::dim(Ty::tensor(Ty::tensor(a(), Ty::Unit), b().negate()));
        assert_eq!(
            t,
            Term::Product(vec![Term::Dim(a()), Term::Dim(b().negate())])
        );
    }

    #[test]
    fn products_stay_flat_and_unitless() {
        let p = Term::product(vec![
            Term::One,
            Term::product(vec![Term::konst("m"), Term::konst("n")]),
            Term::One,
            Term::dim(a()),
        ]);
        assert_eq!(
            p,
            Term::Product(vec![Term::konst("m"), Term::konst("n"), Term::Dim(a())])
        );
        assert_eq!(Term::product(vec![Term::One, Term::One]), Term::One);
        assert_eq!(Term::product(vec![Term::var("x")]), Term::var("x"));
    }

    #[test]
    fn substitution_respects_stars() {
        let t = Term::tensor(Term::var("x").negate(), Term::var("y"));
        let s = t.subst_var("x", &Term::konst("c").negate());
        // x ↦ #c^ so x^ ↦ #c.
        assert_eq!(s, Term::tensor(Term::konst("c"), Term::var("y")));
    }

    #[test]
    fn display_matches_surface_syntax() {
        let t = Term::tensor(
            Term::var("x1").negate(),
            Term::product(vec![Term::dim(a()), Term::konst("c")]),
        );
        assert_eq!(t.to_string(), "(x1^ @ (D[A] . #c))");
    }

    #[test]
    fn constant_freeness() {
        assert!(Term::tensor(Term::var("x"), Term::var("y").negate()).is_constant_free());
        assert!(!Term::One.is_constant_free());
        assert!(!Term::dim(a()).is_constant_free());
        assert!(!Term::product(vec![Term::var("x"), Term::konst("c")]).is_constant_free());
    }

    #[test]
    fn subterm_replacement_prefers_leftmost() {
        let needle = Term::tensor(Term::var("p"), Term::var("q"));
        let hay = Term::tensor(needle.clone(), Term::var("r"));
        let out = hay.replace_subterm_once(&needle, &Term::var("z")).unwrap();
        assert_eq!(out, Term::tensor(Term::var("z"), Term::var("r")));
        assert_eq!(hay.replace_subterm_once(&Term::var("missing"), &Term::One), None);
    }
}
