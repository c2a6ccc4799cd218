//! Shared corpus machinery for the integration tests: a fixed signature
//! over three atoms and a seeded generator of random derivations.
//!
//! Every sequent returned by [`corpus`] is built by a chain of at most
//! eight rule applications starting from an axiom leaf, so all of them
//! are derivable by construction — the property the reduction and
//! preservation suites quantify over.
#![allow(dead_code)] // each test binary uses its own slice of the helpers

use dlc_core::calculus::sugar::{
    arrow, comb_alpha, comb_eps, comb_eta, comb_lambda, comb_rho, comb_sigma, id_arrow,
};
use dlc_core::calculus::{
    dagger_flip, rule_const, rule_curry, rule_cut, rule_exchange, rule_id, rule_one,
    rule_tensor_l, rule_tensor_r, rule_uncurry, rule_unit_left_inv, rule_unit_right_inv,
    rule_untensor_l,
};
use dlc_core::error::Result;
use dlc_core::model::{Signature, Tensor};
use dlc_core::{Sequent, Ty};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Atoms A (dim 2), B (dim 3), C (dim 2) plus valued constants: arrows
/// f : A -o B, g : B -o C, h : C -o A and scalars m, n.
pub fn signature(seed: u64) -> Signature {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sig = Signature::new();
    sig.declare_type("A", 2).unwrap();
    sig.declare_type("B", 3).unwrap();
    sig.declare_type("C", 2).unwrap();
    let mut arr = |sig: &mut Signature, name: &str, from: &str, to: &str| {
        let ty = Ty::tensor(Ty::atom(from).negate(), Ty::atom(to));
        let shape = vec![sig.atom_dim(from).unwrap(), sig.atom_dim(to).unwrap()];
        let value = Tensor::random(shape, &mut rng);
        sig.declare_const(name, ty, Some(value)).unwrap();
    };
    arr(&mut sig, "f", "A", "B");
    arr(&mut sig, "g", "B", "C");
    arr(&mut sig, "h", "C", "A");
    sig.declare_const("m", Ty::Unit, Some(Tensor::random(vec![], &mut rng))).unwrap();
    sig.declare_const("n", Ty::Unit, Some(Tensor::random(vec![], &mut rng))).unwrap();
    sig
}

fn random_atom(rng: &mut ChaCha8Rng) -> Ty {
    Ty::atom(["A", "B", "C"][rng.gen_range(0..3)])
}

fn random_ty(rng: &mut ChaCha8Rng, depth: usize) -> Ty {
    match rng.gen_range(0..6) {
        0 if depth > 0 => Ty::tensor(random_ty(rng, depth - 1), random_ty(rng, depth - 1)),
        1 => random_atom(rng).negate(),
        _ => random_atom(rng),
    }
}

fn leaf(rng: &mut ChaCha8Rng) -> Sequent {
    let pick = rng.gen_range(0..10);
    let result = match pick {
        0 => rule_id("x", random_ty(rng, 1)),
        1 => Ok(rule_one()),
        2 => {
            let (name, from, to) = [("f", "A", "B"), ("g", "B", "C"), ("h", "C", "A")]
                [rng.gen_range(0..3)];
            rule_const(name, &Ty::tensor(Ty::atom(from).negate(), Ty::atom(to)))
        }
        3 => id_arrow(&random_ty(rng, 1)),
        4 => arrow(&comb_sigma(&random_atom(rng), &random_atom(rng))),
        5 => arrow(&comb_alpha(&random_atom(rng), &random_atom(rng), &random_atom(rng))),
        6 => arrow(&comb_eta(&random_atom(rng))),
        7 => arrow(&comb_eps(&random_atom(rng))),
        8 => arrow(&comb_lambda(&random_atom(rng))),
        _ => arrow(&comb_rho(&random_atom(rng))),
    };
    result.expect("axiom leaves are well formed")
}

fn try_grow(rng: &mut ChaCha8Rng, s: &Sequent) -> Result<Sequent> {
    match rng.gen_range(0..12) {
        0 => {
            let other = leaf(rng).renamed_apart(&s.all_var_names());
            rule_cut(s, &other)
        }
        1 => {
            // A cut that always applies: compose with the identity at the
            // conclusion type.  Its connection binds variables on both
            // sides, feeding the consumption-symmetry checks.
            let id = id_arrow(&s.conclusion().ty)?.renamed_apart(&s.all_var_names());
            rule_cut(s, &id)
        }
        2 => {
            let other = leaf(rng).renamed_apart(&s.all_var_names());
            rule_tensor_r(s, &other)
        }
        3 => rule_tensor_l(s, random_pos(rng, s)?),
        4 => rule_untensor_l(s, random_pos(rng, s)?),
        5 => rule_exchange(s, random_pos(rng, s)?),
        6 => rule_curry(s),
        7 => rule_uncurry(s),
        8 => dlc_core::calculus::rule_negation(s),
        9 => dagger_flip(s),
        10 => rule_unit_left_inv(s),
        _ => rule_unit_right_inv(s),
    }
}

fn random_pos(rng: &mut ChaCha8Rng, s: &Sequent) -> Result<usize> {
    let n = s.context().len();
    if n == 0 {
        return Err(dlc_core::Error::Rule("no hypotheses".into()));
    }
    Ok(rng.gen_range(0..n))
}

/// One random derivation of at most `budget` rule applications
/// (counting the leaf).
pub fn derive(rng: &mut ChaCha8Rng, budget: usize) -> Sequent {
    let mut s = leaf(rng);
    let mut applied = 1;
    let mut misses = 0;
    while applied < budget && misses < 20 {
        match try_grow(rng, &s) {
            Ok(next) => {
                s = next;
                applied += 1;
            }
            Err(_) => misses += 1,
        }
    }
    s
}

/// `n` random derivations of at most 8 rules each, reproducible per seed.
pub fn corpus(n: usize, seed: u64) -> Vec<Sequent> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let budget = rng.gen_range(1..=8);
            derive(&mut rng, budget)
        })
        .collect()
}

/// Massage a derived sequent into single-hypothesis form: close an empty
/// context by tensoring with an identity axiom, then fold the hypotheses
/// into one with ⊗L.
pub fn single_hypothesis(s: &Sequent) -> Sequent {
    let mut s = s.clone();
    if s.context().is_empty() {
        let id = rule_id("w", Ty::atom("A")).unwrap().renamed_apart(&s.all_var_names());
        s = rule_tensor_r(&s, &id).unwrap();
    }
    while s.context().len() > 1 {
        s = rule_tensor_l(&s, 0).unwrap();
    }
    s
}
