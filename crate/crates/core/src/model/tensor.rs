//! Dense complex tensors in row-major layout.
//!
//! Shapes follow the atomic slot list of a type: one axis per atomic (or
//! dual-atomic) leaf, unit leaves contributing none.  A rank-0 tensor is a
//! scalar.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<Complex64>,
}

/// Nested bracket literal, the parse result of `= [...]` clauses in
/// signature files.
#[derive(Debug, Clone, PartialEq)]
pub enum Lit {
    Scalar(Complex64),
    List(Vec<Lit>),
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<Complex64>) -> Result<Tensor> {
        let expect: usize = shape.iter().product();
        if data.len() != expect {
            return Err(Error::Model(format!(
                "tensor data has {} entries but shape {:?} needs {}",
                data.len(),
                shape,
                expect
            )));
        }
        Ok(Tensor { shape, data })
    }

    pub fn scalar(z: Complex64) -> Tensor {
        Tensor { shape: vec![], data: vec![z] }
    }

    pub fn zeros(shape: Vec<usize>) -> Tensor {
        let n = shape.iter().product();
        Tensor { shape, data: vec![Complex64::new(0.0, 0.0); n] }
    }

    /// Uniform random entries with both parts in [-1, 1].
    pub fn random(shape: Vec<usize>, rng: &mut impl Rng) -> Tensor {
        let n: usize = shape.iter().product();
        let data = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Tensor { shape, data }
    }

    pub fn identity(dim: usize) -> Tensor {
        let mut t = Tensor::zeros(vec![dim, dim]);
        for i in 0..dim {
            let idx = t.flat_index(&[i, i]);
            t.data[idx] = Complex64::new(1.0, 0.0);
        }
        t
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        let mut flat = 0;
        for (i, d) in idx.iter().zip(&self.shape) {
            debug_assert!(i < d);
            flat = flat * d + i;
        }
        flat
    }

    pub fn get(&self, idx: &[usize]) -> Complex64 {
        self.data[self.flat_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], z: Complex64) {
        let flat = self.flat_index(idx);
        self.data[flat] = z;
    }

    pub fn add_at(&mut self, idx: &[usize], z: Complex64) {
        let flat = self.flat_index(idx);
        self.data[flat] += z;
    }

    pub fn conj(&self) -> Tensor {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(Complex64::conj).collect(),
        }
    }

    pub fn scale(&self, z: Complex64) -> Tensor {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|x| x * z).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Entrywise sup-distance; an error when shapes disagree.
    pub fn max_abs_diff(&self, other: &Tensor) -> Result<f64> {
        if self.shape != other.shape {
            return Err(Error::Model(format!(
                "shape mismatch: {:?} vs {:?}",
                self.shape, other.shape
            )));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Build from a nested bracket literal, checking the nesting against
    /// `shape` exactly.
    pub fn from_lit(lit: &Lit, shape: Vec<usize>) -> Result<Tensor> {
        let mut data = Vec::with_capacity(shape.iter().product());
        collect_lit(lit, &shape, &mut data)?;
        Tensor::new(shape, data)
    }
}

fn collect_lit(lit: &Lit, shape: &[usize], out: &mut Vec<Complex64>) -> Result<()> {
    match (lit, shape) {
        (Lit::Scalar(z), []) => {
            out.push(*z);
            Ok(())
        }
        (Lit::List(items), [d, rest @ ..]) => {
            if items.len() != *d {
                return Err(Error::Model(format!(
                    "tensor literal level has {} entries, expected {}",
                    items.len(),
                    d
                )));
            }
            for item in items {
                collect_lit(item, rest, out)?;
            }
            Ok(())
        }
        (Lit::Scalar(_), _) => Err(Error::Model(
            "tensor literal is too shallow for the declared type".into(),
        )),
        (Lit::List(_), []) => Err(Error::Model(
            "tensor literal is nested deeper than the declared type".into(),
        )),
    }
}

/// Deterministic complex rendering `a+bi` (negative zero normalized away).
pub fn fmt_complex(z: Complex64) -> String {
    let re = if z.re == 0.0 { 0.0 } else { z.re };
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    if im < 0.0 {
        format!("{}-{}i", re, -im)
    } else {
        format!("{re}+{im}i")
    }
}

impl fmt::Display for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn rec(
            f: &mut fmt::Formatter<'_>,
            shape: &[usize],
            data: &[Complex64],
        ) -> fmt::Result {
            match shape {
                [] => write!(f, "{}", fmt_complex(data[0])),
                [d, rest @ ..] => {
                    let stride = data.len() / d;
                    write!(f, "[")?;
                    for i in 0..*d {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        rec(f, rest, &data[i * stride..(i + 1) * stride])?;
                    }
                    write!(f, "]")
                }
            }
        }
        rec(f, &self.shape, &self.data)
    }
}
