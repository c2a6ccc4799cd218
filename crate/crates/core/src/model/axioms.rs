//! The dagger compact closed axioms, checked two ways at once.
//!
//! Each axiom is a pair of arrows built from the combinator sugar —
//! associators, unitors, symmetries, units and counits, composed by Cut
//! and tensored by ⊗R/⊗L.  An axiom holds *syntactically* when both sides
//! reduce to the same canonical normal form (`soup_equiv`), and
//! *semantically* when their matrix interpretations agree entrywise at
//! concrete dimensions.  A report entry passes only when both checks do.
//!
//! The atoms A, B, C, D cycle through the requested dimension list, and
//! the dagger-involution axiom uses a pseudorandom valued constant
//! `f : (A^ @ B)` so that `f†† = f` is checked on an arrow with actual
//! content rather than a structural wiring.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::calculus::sugar::{
    arrow, comb_alpha, comb_eps, comb_eta, comb_lambda, comb_rho, comb_sigma, compose, id_arrow,
    loll, tensor_arrows,
};
use crate::calculus::{dagger_flip, rule_const};
use crate::error::Result;
use crate::rewrite::soup_equiv;
use crate::sequent::Sequent;
use crate::types::Ty;

use super::graph::interpret;
use super::{Signature, Tensor};

/// Outcome of one axiom check: the reduction side and the numeric side.
#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub name: &'static str,
    pub soup_ok: bool,
    pub max_err: f64,
    pub pass: bool,
}

fn axiom_signature(dims: &[usize], seed: u64) -> Result<Signature> {
    let mut sig = Signature::new();
    for (i, name) in ["A", "B", "C", "D"].iter().enumerate() {
        sig.declare_type(*name, dims[i % dims.len()])?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = vec![sig.atom_dim("A")?, sig.atom_dim("B")?];
    let f = Tensor::random(shape, &mut rng);
    sig.declare_const("f", loll(Ty::atom("A"), Ty::atom("B")), Some(f))?;
    Ok(sig)
}

fn check(
    name: &'static str,
    lhs: &Sequent,
    rhs: &Sequent,
    sig: &Signature,
    tol: f64,
) -> Result<AxiomReport> {
    let soup_ok = soup_equiv(lhs, rhs)?;
    let max_err = interpret(lhs, sig)?.max_abs_diff(&interpret(rhs, sig)?)?;
    Ok(AxiomReport { name, soup_ok, max_err, pass: soup_ok && max_err <= tol })
}

/// Check the coherence and compactness axioms at the given atom
/// dimensions (cycled over A, B, C, D).  `seed` drives the random value
/// of the constant in the dagger-involution check; `tol` is the absolute
/// entrywise tolerance for matrix agreement.
pub fn verify_axioms(dims: &[usize], seed: u64, tol: f64) -> Result<Vec<AxiomReport>> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(crate::error::Error::Model(
            "axiom dimensions must be a non-empty list of sizes >= 1".into(),
        ));
    }
    let sig = axiom_signature(dims, seed)?;
    let (a, b, c, d) = (Ty::atom("A"), Ty::atom("B"), Ty::atom("C"), Ty::atom("D"));
    let sa = a.negate();
    let mut out = Vec::new();

    // Pentagon: the two reassociation routes A@(B@(C@D)) -> ((A@B)@C)@D.
    {
        let lhs = compose(
            &arrow(&comb_alpha(&a, &b, &Ty::tensor(c.clone(), d.clone())))?,
            &arrow(&comb_alpha(&Ty::tensor(a.clone(), b.clone()), &c, &d))?,
        )?;
        let rhs = compose(
            &compose(
                &tensor_arrows(&id_arrow(&a)?, &arrow(&comb_alpha(&b, &c, &d))?)?,
                &arrow(&comb_alpha(&a, &Ty::tensor(b.clone(), c.clone()), &d))?,
            )?,
            &tensor_arrows(&arrow(&comb_alpha(&a, &b, &c))?, &id_arrow(&d)?)?,
        )?;
        out.push(check("pentagon", &lhs, &rhs, &sig, tol)?);
    }

    // Triangle: reassociating past the unit, A@(I@B) -> A@B.
    {
        let lhs = compose(
            &arrow(&comb_alpha(&a, &Ty::Unit, &b))?,
            &tensor_arrows(&arrow(&comb_rho(&a))?, &id_arrow(&b)?)?,
        )?;
        let rhs = tensor_arrows(&id_arrow(&a)?, &arrow(&comb_lambda(&b))?)?;
        out.push(check("triangle", &lhs, &rhs, &sig, tol)?);
    }

    // Symmetry is an involution: s;s = id at A@B.
    {
        let lhs = compose(&arrow(&comb_sigma(&a, &b))?, &arrow(&comb_sigma(&b, &a))?)?;
        let rhs = id_arrow(&Ty::tensor(a.clone(), b.clone()))?;
        out.push(check("sigma-sigma", &lhs, &rhs, &sig, tol)?);
    }

    // The unitors agree across the symmetry: rho = lambda . sigma.
    {
        let lhs = compose(&arrow(&comb_sigma(&a, &Ty::Unit))?, &arrow(&comb_lambda(&a))?)?;
        let rhs = arrow(&comb_rho(&a))?;
        out.push(check("rho-lambda-sigma", &lhs, &rhs, &sig, tol)?);
    }

    // Hexagon: braiding a tensor past C in one move or two.
    {
        let lhs = compose(
            &compose(
                &arrow(&comb_alpha(&a, &b, &c))?,
                &arrow(&comb_sigma(&Ty::tensor(a.clone(), b.clone()), &c))?,
            )?,
            &arrow(&comb_alpha(&c, &a, &b))?,
        )?;
        let rhs = compose(
            &compose(
                &tensor_arrows(&id_arrow(&a)?, &arrow(&comb_sigma(&b, &c))?)?,
                &arrow(&comb_alpha(&a, &c, &b))?,
            )?,
            &tensor_arrows(&arrow(&comb_sigma(&a, &c))?, &id_arrow(&b)?)?,
        )?;
        out.push(check("hexagon", &lhs, &rhs, &sig, tol)?);
    }

    // Yanking: rho^-1; (id @ eta); assoc; (eps @ id); lambda = id at A.
    {
        let lhs = compose(
            &compose(
                &compose(
                    &compose(
                        &dagger_flip(&arrow(&comb_rho(&a))?)?,
                        &tensor_arrows(&id_arrow(&a)?, &arrow(&comb_eta(&a))?)?,
                    )?,
                    &arrow(&comb_alpha(&a, &sa, &a))?,
                )?,
                &tensor_arrows(&arrow(&comb_eps(&a))?, &id_arrow(&a)?)?,
            )?,
            &arrow(&comb_lambda(&a))?,
        )?;
        let rhs = id_arrow(&a)?;
        out.push(check("yank", &lhs, &rhs, &sig, tol)?);
    }

    // The dual yanking equation at A^.
    {
        let lhs = compose(
            &compose(
                &compose(
                    &compose(
                        &dagger_flip(&arrow(&comb_lambda(&sa))?)?,
                        &tensor_arrows(&arrow(&comb_eta(&a))?, &id_arrow(&sa)?)?,
                    )?,
                    &dagger_flip(&arrow(&comb_alpha(&sa, &a, &sa))?)?,
                )?,
                &tensor_arrows(&id_arrow(&sa)?, &arrow(&comb_eps(&a))?)?,
            )?,
            &arrow(&comb_rho(&sa))?,
        )?;
        let rhs = id_arrow(&sa)?;
        out.push(check("yank-dual", &lhs, &rhs, &sig, tol)?);
    }

    // The dagger is an involution on an arrow with real content.
    {
        let fseq = rule_const("f", &loll(a.clone(), b.clone()))?;
        let lhs = dagger_flip(&dagger_flip(&fseq)?)?;
        out.push(check("dagger-involution", &lhs, &fseq, &sig, tol)?);
    }

    // The counit's dagger braids into the unit: sigma . eps† = eta.
    {
        let lhs = compose(
            &dagger_flip(&arrow(&comb_eps(&a))?)?,
            &arrow(&comb_sigma(&a, &sa))?,
        )?;
        let rhs = arrow(&comb_eta(&a))?;
        out.push(check("sigma-eps-dagger", &lhs, &rhs, &sig, tol)?);
    }

    Ok(out)
}
