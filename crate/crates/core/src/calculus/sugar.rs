//! Derived forms: λ-sugar, the combinator alphabet, and arrow algebra.
//!
//! A *combinator* is a closed sequent `|-_S t:T`; its *arrow form* is one
//! `rule_uncurry` away, turning `|- (a^ @ b):(A^ @ B)` into `a:A |- b:B`.
//! Arrows compose by Cut and tensor by ⊗R followed by ⊗L, and the unitary
//! structural isomorphisms are inverted by the †-flip.  Unlike the raw
//! rules, the arrow operations here rename premises apart automatically.

use super::{rule_cut, rule_tensor_l, rule_tensor_r, rule_uncurry};
use crate::error::{Error, Result};
use crate::sequent::{Connection, Sequent, Soup, TypedTerm};
use crate::term::Term;
use crate::types::Ty;

/// λ-abstraction as a term: `λa.b = (a^ @ b)`.
pub fn lambda(a: Term, b: Term) -> Term {
    Term::tensor(a.negate(), b)
}

/// The function type `A ⊸ B = (A^ @ B)`.
pub fn loll(a: Ty, b: Ty) -> Ty {
    Ty::tensor(a.negate(), b)
}

fn closed(term: Term, ty: Ty) -> Sequent {
    Sequent::new(Vec::new(), Soup::new(), TypedTerm::new(term, ty))
        .expect("combinator sequents are valid by construction")
}

fn closed_with(soup: Vec<Connection>, term: Term, ty: Ty) -> Sequent {
    Sequent::new(
        Vec::new(),
        Soup::from_connections(soup),
        TypedTerm::new(term, ty),
    )
    .expect("combinator sequents are valid by construction")
}

/// The identity combinator `λx.x : A ⊸ A`.
pub fn comb_id(a: &Ty) -> Sequent {
    let x = Term::var("x");
    closed(lambda(x.clone(), x), loll(a.clone(), a.clone()))
}

/// The symmetry combinator `s̄ = λ(b@a).(b@a) : (B@A) ⊸ (B@A)` read as
/// swapping — its arrow form is `(a @ b):(A @ B) |- (b @ a):(B @ A)`.
pub fn comb_sigma(a: &Ty, b: &Ty) -> Sequent {
    let (va, vb) = (Term::var("a"), Term::var("b"));
    closed(
        lambda(Term::tensor(va.clone(), vb.clone()), Term::tensor(vb, va)),
        loll(Ty::tensor(a.clone(), b.clone()), Ty::tensor(b.clone(), a.clone())),
    )
}

/// The associator combinator; its arrow form is
/// `(a @ (b @ c)):(A @ (B @ C)) |- ((a @ b) @ c):((A @ B) @ C)`.
pub fn comb_alpha(a: &Ty, b: &Ty, c: &Ty) -> Sequent {
    let (va, vb, vc) = (Term::var("a"), Term::var("b"), Term::var("c"));
    closed(
        lambda(
            Term::tensor(va.clone(), Term::tensor(vb.clone(), vc.clone())),
            Term::tensor(Term::tensor(va, vb), vc),
        ),
        loll(
            Ty::tensor(a.clone(), Ty::tensor(b.clone(), c.clone())),
            Ty::tensor(Ty::tensor(a.clone(), b.clone()), c.clone()),
        ),
    )
}

/// The unit (cap) combinator `η_A = (1 @ (x^ @ x)) : I ⊸ (A^ @ A)`.
pub fn comb_eta(a: &Ty) -> Sequent {
    let x = Term::var("x");
    closed(
        lambda(Term::One, Term::tensor(x.negate(), x)),
        loll(Ty::Unit, loll(a.clone(), a.clone())),
    )
}

/// The counit (cup) combinator `ε_A = ((x @ x^) @ 1) : (A @ A^) ⊸ I`.
pub fn comb_eps(a: &Ty) -> Sequent {
    let x = Term::var("x");
    closed(
        lambda(Term::tensor(x.clone(), x.negate()), Term::One),
        loll(Ty::tensor(a.clone(), a.negate()), Ty::Unit),
    )
}

/// The left unitor `λ_A = λ(1@a).a : (I @ A) ⊸ A`.
pub fn comb_lambda(a: &Ty) -> Sequent {
    let va = Term::var("a");
    closed(
        lambda(Term::tensor(Term::One, va.clone()), va),
        loll(Ty::tensor(Ty::Unit, a.clone()), a.clone()),
    )
}

/// The right unitor `ρ_A = λ(a@1).a : (A @ I) ⊸ A`.
pub fn comb_rho(a: &Ty) -> Sequent {
    let va = Term::var("a");
    closed(
        lambda(Term::tensor(va.clone(), Term::One), va),
        loll(Ty::tensor(a.clone(), Ty::Unit), a.clone()),
    )
}

/// The composition combinator
/// `b̄ = λg.λf.λa.g(fa) : (B ⊸ C) ⊸ ((A ⊸ B) ⊸ (A ⊸ C))`,
/// with the two applications spelled out in the soup.
pub fn comb_bbar(a: &Ty, b: &Ty, c: &Ty) -> Sequent {
    let (f, g, va) = (Term::var("f"), Term::var("g"), Term::var("a"));
    let (x1, x2) = (Term::var("x1"), Term::var("x2"));
    let fa = Connection::new(
        f.clone(),
        Term::tensor(va.negate(), x1.clone()),
        loll(a.clone(), b.clone()),
    );
    let gx = Connection::new(
        g.clone(),
        Term::tensor(x1.negate(), x2.clone()),
        loll(b.clone(), c.clone()),
    );
    closed_with(
        vec![fa, gx],
        lambda(g, lambda(f, lambda(va, x2))),
        loll(
            loll(b.clone(), c.clone()),
            loll(loll(a.clone(), b.clone()), loll(a.clone(), c.clone())),
        ),
    )
}

/// The tensoring combinator
/// `t̄ = λf.λg.λ(x1@x2).(y1@y2) : (A ⊸ B) ⊸ ((C ⊸ D) ⊸ ((A@C) ⊸ (B@D)))`,
/// with `fx1 = y1` and `gx2 = y2` in the soup.
pub fn comb_tbar(a: &Ty, b: &Ty, c: &Ty, d: &Ty) -> Sequent {
    let (f, g) = (Term::var("f"), Term::var("g"));
    let (x1, x2) = (Term::var("x1"), Term::var("x2"));
    let (y1, y2) = (Term::var("y1"), Term::var("y2"));
    let fx = Connection::new(
        f.clone(),
        Term::tensor(x1.negate(), y1.clone()),
        loll(a.clone(), b.clone()),
    );
    let gx = Connection::new(
        g.clone(),
        Term::tensor(x2.negate(), y2.clone()),
        loll(c.clone(), d.clone()),
    );
    closed_with(
        vec![fx, gx],
        lambda(
            f,
            lambda(
                g,
                lambda(Term::tensor(x1, x2), Term::tensor(y1, y2)),
            ),
        ),
        loll(
            loll(a.clone(), b.clone()),
            loll(
                loll(c.clone(), d.clone()),
                loll(Ty::tensor(a.clone(), c.clone()), Ty::tensor(b.clone(), d.clone())),
            ),
        ),
    )
}

/// The arrow form of a combinator: one Uncurry.
pub fn arrow(j: &Sequent) -> Result<Sequent> {
    rule_uncurry(j)
}

/// The identity arrow `x:A |- x:A` obtained from the identity combinator.
pub fn id_arrow(a: &Ty) -> Result<Sequent> {
    arrow(&comb_id(a))
}

/// The composite of `f : A -> B` and `g : B -> C`, i.e. the categorical
/// `[g] ∘ [f]`, by Cut after renaming `g` apart from `f`.
pub fn compose(f: &Sequent, g: &Sequent) -> Result<Sequent> {
    let g2 = g.renamed_apart(&f.all_var_names());
    rule_cut(f, &g2)
}

/// The tensor of arrows `f ⊗ g : (A @ C) -> (B @ D)`: ⊗R after renaming
/// apart, then ⊗L to fold the two hypotheses into one.
pub fn tensor_arrows(f: &Sequent, g: &Sequent) -> Result<Sequent> {
    if f.context().len() != 1 || g.context().len() != 1 {
        return Err(Error::Rule(format!(
            "tensoring needs single-hypothesis arrows, found {} and {}",
            f.context().len(),
            g.context().len()
        )));
    }
    let g2 = g.renamed_apart(&f.all_var_names());
    rule_tensor_l(&rule_tensor_r(f, &g2)?, 0)
}

/// A closed application `|- { f : (t^ @ x) } x:B` of a closed function
/// term `f:(A^ @ B)` to a closed argument term `t:A`; the direct route to
/// a β-redex.
pub fn apply_closed(f: &Term, fty: &Ty, t: &Term) -> Result<Sequent> {
    let Ty::Tensor(_, q) = fty else {
        return Err(Error::Rule(format!(
            "application needs a function type (A^ @ B), found {fty}"
        )));
    };
    let x = Term::var("v1");
    let conn = Connection::new(
        f.clone(),
        Term::tensor(t.negate(), x.clone()),
        fty.clone(),
    );
    Sequent::from_parts(
        Vec::new(),
        Soup::from_connections(vec![conn]),
        TypedTerm::new(x, (**q).clone()),
        2,
    )
}
