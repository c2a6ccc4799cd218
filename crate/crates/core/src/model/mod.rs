//! Finite-dimensional matrix semantics.
//!
//! A signature assigns a dimension to each atomic type and an optional
//! concrete tensor to each constant.  Sequents compile to wire graphs
//! (tensor networks) whose contraction yields the interpretation: one open
//! axis per atomic context slot, then per atomic conclusion slot.  Duals
//! are interpreted by the same space (self-dual bases), and the pairing is
//! sesquilinear: conjugation lands on constants at odd star/side parity.

pub mod axioms;
pub mod graph;
pub mod tensor;

pub use axioms::{verify_axioms, AxiomReport};
pub use graph::{
    check_step_preservation, compile, contract, contract_naive, interpret, WireGraph,
    WireNode,
};
pub use tensor::{fmt_complex, Lit, Tensor};

use crate::error::{Error, Result};
use crate::types::Ty;
use std::collections::BTreeMap;

/// A declared constant: its type and, when valued, its tensor.
#[derive(Debug, Clone)]
pub struct ConstDecl {
    pub ty: Ty,
    pub value: Option<Tensor>,
}

/// Dimensions for atomic types and declarations for constants.
#[derive(Debug, Clone, Default)]
pub struct Signature {
    dims: BTreeMap<String, usize>,
    consts: BTreeMap<String, ConstDecl>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn declare_type(&mut self, name: impl Into<String>, dim: usize) -> Result<()> {
        let name = name.into();
        if dim == 0 {
            return Err(Error::Model(format!("type {name} needs dimension >= 1")));
        }
        if self.dims.insert(name.clone(), dim).is_some() {
            return Err(Error::Model(format!("type {name} declared twice")));
        }
        Ok(())
    }

    /// Declare a constant; a provided value must match the slot dimensions
    /// of the declared type exactly.
    pub fn declare_const(
        &mut self,
        name: impl Into<String>,
        ty: Ty,
        value: Option<Tensor>,
    ) -> Result<()> {
        let name = name.into();
        if let Some(t) = &value {
            let want = self.slot_dims(&ty)?;
            if t.shape() != want.as_slice() {
                return Err(Error::Model(format!(
                    "constant {name}: value shape {:?} does not match type {ty} (slots {:?})",
                    t.shape(),
                    want
                )));
            }
        }
        if self
            .consts
            .insert(name.clone(), ConstDecl { ty, value })
            .is_some()
        {
            return Err(Error::Model(format!("constant {name} declared twice")));
        }
        Ok(())
    }

    pub fn atom_dim(&self, name: &str) -> Result<usize> {
        self.dims
            .get(name)
            .copied()
            .ok_or_else(|| Error::Model(format!("atomic type {name} has no declared dimension")))
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&str, usize)> {
        self.dims.iter().map(|(n, d)| (n.as_str(), *d))
    }

    pub fn const_decl(&self, name: &str) -> Option<&ConstDecl> {
        self.consts.get(name)
    }

    pub fn consts(&self) -> impl Iterator<Item = (&str, &ConstDecl)> {
        self.consts.iter().map(|(n, d)| (n.as_str(), d))
    }

    /// Dimension of a type: the product of its atomic slot dimensions
    /// (duals share their atom's dimension; `I` has dimension one).
    pub fn dim_of(&self, ty: &Ty) -> Result<usize> {
        Ok(self.slot_dims(ty)?.iter().product())
    }

    /// Dimensions of the atomic slots of `ty`, left to right.
    pub fn slot_dims(&self, ty: &Ty) -> Result<Vec<usize>> {
        ty.slots()
            .iter()
            .map(|slot| {
                let atom = slot.slot_atom().ok_or_else(|| {
                    Error::Internal(format!("non-atomic slot {slot} in {ty}"))
                })?;
                self.atom_dim(atom)
            })
            .collect()
    }
}
