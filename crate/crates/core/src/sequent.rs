//! Sequents `Γ |-_S t:T`: a typed context, a soup of connections, and a
//! typed conclusion.
//!
//! A *connection* `t : u` at type `T` is an unordered-up-to-congruence pair:
//! `(t : u)` and `(u^ : t^)` denote the same wiring, so [`Connection::new`]
//! stores whichever orientation is lexicographically least and equality is
//! plain structural equality.  A [`Soup`] is a multiset of connections,
//! stored sorted.
//!
//! [`Sequent::new`] enforces the two well-formedness conditions that every
//! operation in this crate preserves: each position is well-typed (stars
//! check against the negated type, tensors against tensor types, scalars
//! against `I`), and every variable occurs exactly twice across the whole
//! sequent.

use crate::error::{Error, Result};
use crate::term::Term;
use crate::types::Ty;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

/// A term together with its type, as it appears in a context slot or as
/// the conclusion.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypedTerm {
    pub term: Term,
    pub ty: Ty,
}

impl TypedTerm {
    pub fn new(term: Term, ty: Ty) -> TypedTerm {
        TypedTerm { term, ty }
    }
}

impl fmt::Display for TypedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.term, self.ty)
    }
}

/// An equityped pair `left : right` at type `ty`, stored in canonical
/// orientation: of the two congruent presentations `(l : r)` and
/// `(r^ : l^)` the lexicographically smaller triple is kept.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Connection {
    left: Term,
    right: Term,
    ty: Ty,
}

impl Connection {
    pub fn new(left: Term, right: Term, ty: Ty) -> Connection {
        let flipped = (right.negate(), left.negate(), ty.negate());
        let direct = (left, right, ty);
        let (left, right, ty) = if (&flipped.0, &flipped.1, &flipped.2)
            < (&direct.0, &direct.1, &direct.2)
        {
            flipped
        } else {
            direct
        };
        Connection { left, right, ty }
    }

    pub fn left(&self) -> &Term {
        &self.left
    }

    pub fn right(&self) -> &Term {
        &self.right
    }

    pub fn ty(&self) -> &Ty {
        &self.ty
    }

    /// The congruent presentation with the roles swapped: `(r^ : l^)` at
    /// the negated type.  `Connection::new` on the result gives back `self`.
    pub fn flipped_parts(&self) -> (Term, Term, Ty) {
        (self.right.negate(), self.left.negate(), self.ty.negate())
    }

    /// Pointwise negation `(t : u) ↦ (t^ : u^)` at the negated type.
    pub fn negated(&self) -> Connection {
        Connection::new(self.left.negate(), self.right.negate(), self.ty.negate())
    }

    pub fn count_vars(&self, counts: &mut BTreeMap<String, usize>) {
        self.left.count_vars(counts);
        self.right.count_vars(counts);
    }
}

/// Connections always print with their type annotation so that parsing a
/// printed sequent never needs inference to succeed.
impl fmt::Display for Connection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} :[{}] {}", self.left, self.ty, self.right)
    }
}

/// A multiset of connections, stored sorted so that structural equality is
/// multiset equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Soup(Vec<Connection>);

impl Soup {
    pub fn new() -> Soup {
        Soup(Vec::new())
    }

    pub fn from_connections(conns: impl IntoIterator<Item = Connection>) -> Soup {
        let mut v: Vec<Connection> = conns.into_iter().collect();
        v.sort();
        Soup(v)
    }

    pub fn insert(&mut self, conn: Connection) {
        let pos = self.0.partition_point(|c| c <= &conn);
        self.0.insert(pos, conn);
    }

    /// Remove one copy of `conn`; false when absent.
    pub fn remove_one(&mut self, conn: &Connection) -> bool {
        match self.0.iter().position(|c| c == conn) {
            Some(i) => {
                self.0.remove(i);
                true
            }
            None => false,
        }
    }

    pub fn union(mut self, other: Soup) -> Soup {
        self.0.extend(other.0);
        self.0.sort();
        self
    }

    /// Pointwise negation `S_*`.
    pub fn negated(&self) -> Soup {
        Soup::from_connections(self.0.iter().map(Connection::negated))
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Connection> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, conn: &Connection) -> bool {
        self.0.iter().any(|c| c == conn)
    }

    pub fn count_vars(&self, counts: &mut BTreeMap<String, usize>) {
        for c in &self.0 {
            c.count_vars(counts);
        }
    }
}

impl fmt::Display for Soup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{ ")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, " }}")
    }
}

/// A sequent `Γ |-_S t:T`.
///
/// Equality, ordering, and hashing ignore the fresh-name counter, which is
/// bookkeeping rather than content.
#[derive(Debug, Clone)]
pub struct Sequent {
    context: Vec<TypedTerm>,
    soup: Soup,
    conclusion: TypedTerm,
    /// Next candidate index for [`Sequent::fresh_var`] names `v1, v2, ...`.
    fresh: u32,
}

impl PartialEq for Sequent {
    fn eq(&self, other: &Self) -> bool {
        self.context == other.context
            && self.soup == other.soup
            && self.conclusion == other.conclusion
    }
}

impl Eq for Sequent {}

impl Hash for Sequent {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.context.hash(state);
        self.soup.hash(state);
        self.conclusion.hash(state);
    }
}

impl Sequent {
    /// Build and fully validate a sequent: star-normal representation,
    /// consistent typing at every position, and exact double occurrence of
    /// every variable.
    pub fn new(
        context: Vec<TypedTerm>,
        soup: Soup,
        conclusion: TypedTerm,
    ) -> Result<Sequent> {
        let seq = Sequent { context, soup, conclusion, fresh: 1 };
        seq.check()?;
        Ok(seq)
    }

    pub fn context(&self) -> &[TypedTerm] {
        &self.context
    }

    pub fn soup(&self) -> &Soup {
        &self.soup
    }

    pub fn conclusion(&self) -> &TypedTerm {
        &self.conclusion
    }

    /// Deconstruct into parts (context, soup, conclusion), dropping the
    /// fresh-name counter.
    pub fn into_parts(self) -> (Vec<TypedTerm>, Soup, TypedTerm) {
        (self.context, self.soup, self.conclusion)
    }

    /// Rebuild from parts produced by a validity-preserving transformation.
    /// Validation still runs; `carry_fresh` keeps the counter monotone so
    /// fresh names never collide with ones handed out earlier.
    pub fn from_parts(
        context: Vec<TypedTerm>,
        soup: Soup,
        conclusion: TypedTerm,
        carry_fresh: u32,
    ) -> Result<Sequent> {
        let mut seq = Sequent::new(context, soup, conclusion)?;
        seq.fresh = seq.fresh.max(carry_fresh);
        Ok(seq)
    }

    pub fn fresh_counter(&self) -> u32 {
        self.fresh
    }

    /// Full well-formedness check: typing plus linearity.
    pub fn check(&self) -> Result<()> {
        self.infer_types()?;
        self.check_linearity()
    }

    /// Every variable must occur exactly twice across context, soup, and
    /// conclusion.
    pub fn check_linearity(&self) -> Result<()> {
        let counts = self.var_counts();
        let bad: Vec<String> = counts
            .iter()
            .filter(|(_, &n)| n != 2)
            .map(|(name, n)| format!("{name} occurs {n} time(s)"))
            .collect();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Linearity(format!(
                "every variable must occur exactly twice: {}",
                bad.join(", ")
            )))
        }
    }

    pub fn var_counts(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for entry in &self.context {
            entry.term.count_vars(&mut counts);
        }
        self.soup.count_vars(&mut counts);
        self.conclusion.term.count_vars(&mut counts);
        counts
    }

    /// Check typing at every position and return the variable typing.
    pub fn var_types(&self) -> Result<BTreeMap<String, Ty>> {
        Ok(self.infer_types()?.0)
    }

    /// Check typing at every position and return the constant typing.
    pub fn const_types(&self) -> Result<BTreeMap<String, Ty>> {
        Ok(self.infer_types()?.1)
    }

    fn infer_types(&self) -> Result<(BTreeMap<String, Ty>, BTreeMap<String, Ty>)> {
        let mut vars = BTreeMap::new();
        let mut consts = BTreeMap::new();
        for entry in &self.context {
            check_term(&entry.term, &entry.ty, &mut vars, &mut consts)?;
        }
        for conn in self.soup.iter() {
            check_term(conn.left(), conn.ty(), &mut vars, &mut consts)?;
            check_term(conn.right(), conn.ty(), &mut vars, &mut consts)?;
        }
        check_term(
            &self.conclusion.term,
            &self.conclusion.ty,
            &mut vars,
            &mut consts,
        )?;
        Ok((vars, consts))
    }

    pub fn all_var_names(&self) -> BTreeSet<String> {
        self.var_counts().into_keys().collect()
    }

    /// Hand out a variable name unused anywhere in this sequent.
    pub fn fresh_var(&mut self) -> String {
        let used = self.all_var_names();
        loop {
            let name = format!("v{}", self.fresh);
            self.fresh += 1;
            if !used.contains(&name) {
                return name;
            }
        }
    }

    /// Rename every variable to a fresh name disjoint from `taken` (and
    /// from the sequent's own names).  Used to make premises variable-
    /// disjoint before two-premise rules.
    pub fn renamed_apart(&self, taken: &BTreeSet<String>) -> Sequent {
        let own = self.all_var_names();
        let mut map = BTreeMap::new();
        let mut n = self.fresh;
        for name in &own {
            loop {
                let cand = format!("v{n}");
                n += 1;
                if !taken.contains(&cand) && !own.contains(&cand) && !map_has_value(&map, &cand)
                {
                    map.insert(name.clone(), cand);
                    break;
                }
            }
        }
        let mut out = self.rename_vars(&map);
        out.fresh = n;
        out
    }

    /// Apply a variable renaming to every position.  The caller is
    /// responsible for injectivity; validity is preserved under any
    /// injective renaming.
    pub fn rename_vars(&self, map: &BTreeMap<String, String>) -> Sequent {
        let context = self
            .context
            .iter()
            .map(|e| TypedTerm::new(e.term.rename_vars(map), e.ty.clone()))
            .collect();
        let soup = Soup::from_connections(self.soup.iter().map(|c| {
            Connection::new(
                c.left().rename_vars(map),
                c.right().rename_vars(map),
                c.ty().clone(),
            )
        }));
        let conclusion = TypedTerm::new(
            self.conclusion.term.rename_vars(map),
            self.conclusion.ty.clone(),
        );
        Sequent { context, soup, conclusion, fresh: self.fresh }
    }
}

fn map_has_value(map: &BTreeMap<String, String>, v: &str) -> bool {
    map.values().any(|x| x == v)
}

/// Check `term : ty`, accumulating variable and constant typings and
/// rejecting inconsistencies.
pub(crate) fn check_term(
    term: &Term,
    ty: &Ty,
    vars: &mut BTreeMap<String, Ty>,
    consts: &mut BTreeMap<String, Ty>,
) -> Result<()> {
    if !term.is_star_normal() {
        return Err(Error::Internal(format!("term not star-normal: {term}")));
    }
    check_term_inner(term, ty, vars, consts)
}

fn check_term_inner(
    term: &Term,
    ty: &Ty,
    vars: &mut BTreeMap<String, Ty>,
    consts: &mut BTreeMap<String, Ty>,
) -> Result<()> {
    match term {
        Term::Var(name) => bind(name, ty, vars, "variable"),
        Term::Const(name) => bind(name, ty, consts, "constant"),
        Term::One => expect_unit(term, ty),
        Term::Dim(_) => expect_unit(term, ty),
        Term::Star(inner) => check_term_inner(inner, &ty.negate(), vars, consts),
        Term::Tensor(l, r) => match ty {
            Ty::Tensor(tl, tr) => {
                check_term_inner(l, tl, vars, consts)?;
                check_term_inner(r, tr, vars, consts)
            }
            _ => Err(Error::Type(format!(
                "tensor term {term} needs a tensor type, got {ty}"
            ))),
        },
        Term::Product(fs) => {
            expect_unit(term, ty)?;
            for f in fs {
                check_term_inner(f, &Ty::Unit, vars, consts)?;
            }
            Ok(())
        }
    }
}

fn bind(
    name: &str,
    ty: &Ty,
    table: &mut BTreeMap<String, Ty>,
    what: &str,
) -> Result<()> {
    match table.get(name) {
        None => {
            table.insert(name.to_string(), ty.clone());
            Ok(())
        }
        Some(prev) if prev == ty => Ok(()),
        Some(prev) => Err(Error::Type(format!(
            "{what} {name} used at both {prev} and {ty}"
        ))),
    }
}

fn expect_unit(term: &Term, ty: &Ty) -> Result<()> {
    if *ty == Ty::Unit {
        Ok(())
    } else {
        Err(Error::Type(format!("scalar term {term} needs type I, got {ty}")))
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, entry) in self.context.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            // A line whose first character is `#` would read as a comment,
            // so a leading constant entry gets defensive parentheses.
            if i == 0
                && matches!(entry.term, Term::Const(_) | Term::Star(_) | Term::Product(_))
                && entry.term.to_string().starts_with('#')
            {
                write!(f, "({}):{}", entry.term, entry.ty)?;
                continue;
            }
            write!(f, "{entry}")?;
        }
        if !self.context.is_empty() {
            write!(f, " ")?;
        }
        write!(f, "|- ")?;
        if !self.soup.is_empty() {
            write!(f, "{} ", self.soup)?;
        }
        write!(f, "{}", self.conclusion)
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
    fn c() -> Ty {
        Ty::atom("C")
    }

    #[test]
    fn congruent_presentations_are_equal() {
        let t = Term::tensor(Term::var("x"), Term::konst("c"));
        let u = Term::var("y").negate();
        let ty = Ty::tensor(a(), b());
        let c1 = Connection::new(t.clone(), u.clone(), ty.clone());
        let c2 = Connection::new(u.negate(), t.negate(), ty.negate());
        assert_eq!(c1, c2);
    }

    #[test]
    fn soup_is_a_multiset() {
        let c1 = Connection::new(Term::var("x"), Term::var("y"), a());
        let c2 = Connection::new(Term::One, Term::One, Ty::Unit);
        let s1 = Soup::from_connections(vec![c1.clone(), c2.clone(), c2.clone()]);
        let mut s2 = Soup::new();
        s2.insert(c2.clone());
        s2.insert(c1.clone());
        s2.insert(c2.clone());
        assert_eq!(s1, s2);
        let s3 = Soup::from_connections(vec![c1, c2]);
        assert_ne!(s1, s3, "multiplicity matters");
    }

    #[test]
    fn identity_sequent_checks() {
        let seq = Sequent::new(
            vec![TypedTerm::new(Term::var("x"), a())],
            Soup::new(),
            TypedTerm::new(Term::var("x"), a()),
        )
        .unwrap();
        assert_eq!(seq.to_string(), "x:A |- x:A");
    }

    /// `t1:A |- { t1:t2, x:[B] x, D[C]:1 } t2:A` is well-formed: every
    /// variable twice, scalars at `I`.
    #[test]
    fn mixed_soup_example_checks() {
        let soup = Soup::from_connections(vec![
            Connection::new(Term::var("t1"), Term::var("t2"), a()),
            Connection::new(Term::var("x"), Term::var("x"), b()),
            Connection::new(Term::dim(c()), Term::One, Ty::Unit),
        ]);
        let seq = Sequent::new(
            vec![TypedTerm::new(Term::var("t1"), a())],
            soup,
            TypedTerm::new(Term::var("t2"), a()),
        )
        .unwrap();
        let vt = seq.var_types().unwrap();
        assert_eq!(vt["x"], b());
        assert_eq!(vt["t2"], a());
    }

    #[test]
    fn linearity_rejects_single_and_triple_use() {
        let err = Sequent::new(
            vec![TypedTerm::new(Term::var("x"), a())],
            Soup::new(),
            TypedTerm::new(Term::var("y"), a()),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Linearity(_)), "{err}");

        let soup = Soup::from_connections(vec![Connection::new(
            Term::var("x"),
            Term::var("x"),
            a(),
        )]);
        let err = Sequent::new(
            vec![TypedTerm::new(Term::var("x"), a())],
            soup,
            TypedTerm::new(Term::var("y"), a()),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Linearity(_)), "{err}");
    }

    #[test]
    fn typing_rejects_clashing_variable_types() {
        let soup = Soup::from_connections(vec![Connection::new(
            Term::var("x"),
            Term::var("t"),
            b(),
        )]);
        let err = Sequent::new(
            vec![TypedTerm::new(Term::var("x"), a())],
            soup,
            TypedTerm::new(Term::var("t"), b()),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Type(_)), "{err}");
    }

    #[test]
    fn star_checks_against_negated_type() {
        // x:A in the context, x^ at A^ in the soup: consistent.
        let soup = Soup::from_connections(vec![Connection::new(
            Term::var("x").negate(),
            Term::var("y"),
            a().negate(),
        )]);
        let seq = Sequent::new(
            vec![TypedTerm::new(Term::var("x"), a())],
            soup,
            TypedTerm::new(Term::var("y").negate(), a()),
        );
        assert!(seq.is_ok(), "{seq:?}");
    }

    #[test]
    fn fresh_names_avoid_collisions() {
        let mut seq = Sequent::new(
            vec![TypedTerm::new(Term::var("v1"), a())],
            Soup::new(),
            TypedTerm::new(Term::var("v1"), a()),
        )
        .unwrap();
        let f = seq.fresh_var();
        assert_ne!(f, "v1");
        assert!(f.starts_with('v'));
    }

    #[test]
    fn renamed_apart_is_disjoint_and_equivalent_shape() {
        let seq = Sequent::new(
            vec![TypedTerm::new(Term::var("x"), a())],
            Soup::from_connections(vec![Connection::new(
                Term::var("x"),
                Term::var("y"),
                a(),
            )]),
            TypedTerm::new(Term::var("y"), a()),
        )
        .unwrap();
        let taken: BTreeSet<String> = ["x".to_string(), "y".to_string()].into();
        let renamed = seq.renamed_apart(&taken);
        assert!(renamed.all_var_names().is_disjoint(&taken));
        assert!(renamed.check().is_ok());
        assert_eq!(renamed.context().len(), 1);
        assert_eq!(renamed.soup().len(), 1);
    }

    #[test]
    fn display_forms() {
        let soup = Soup::from_connections(vec![Connection::new(
            Term::var("t1"),
            Term::var("t2"),
            a(),
        )]);
        let seq = Sequent::new(
            vec![TypedTerm::new(Term::var("t1"), a())],
            soup,
            TypedTerm::new(Term::var("t2"), a()),
        )
        .unwrap();
        assert_eq!(seq.to_string(), "t1:A |- { t1 :[A] t2 } t2:A");

        let closed = Sequent::new(
            vec![],
            Soup::new(),
            TypedTerm::new(Term::One, Ty::Unit),
        )
        .unwrap();
        assert_eq!(closed.to_string(), "|- 1:I");
    }
}
