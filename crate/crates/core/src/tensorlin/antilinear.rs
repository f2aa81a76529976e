use std::ops::Mul;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::{kron, operator_norm, ComplexMatrix, TensorVector};
use crate::error::{Error, Result};

/// Antilinear operator `v ↦ u · conj(v)` with `u` unitary.
///
/// Products with linear operators and with other antilinear operators are
/// given by `Mul` impls so the result type records whether the product is
/// linear (`ComplexMatrix`) or antilinear (`AntilinearOp`):
///
/// * `J₁ * J₂ = u₁·conj(u₂)` (linear)
/// * `J * A = u·conj(A)` composed with conjugation (antilinear)
/// * `A * J = (A·u)` composed with conjugation (antilinear)
#[derive(Clone, Debug, PartialEq)]
pub struct AntilinearOp {
    u: ComplexMatrix,
}

impl AntilinearOp {
    pub fn new(u: ComplexMatrix) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::DimensionMismatch {
                context: "antilinear operator must be square",
                expected: u.nrows(),
                found: u.ncols(),
            });
        }
        Ok(Self { u })
    }

    /// Entrywise complex conjugation on ℂⁿ.
    pub fn conjugation(n: usize) -> Self {
        Self {
            u: DMatrix::identity(n, n),
        }
    }

    /// Conjugation followed by the permutation `e_s ↦ e_{perm[s]}`.
    pub fn permuted_conjugation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut u = DMatrix::zeros(n, n);
        for (s, &t) in perm.iter().enumerate() {
            u[(t, s)] = C64::new(1.0, 0.0);
        }
        Self { u }
    }

    pub fn unitary_part(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn apply(&self, v: &DVector<C64>) -> Result<DVector<C64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "antilinear operator applied to vector",
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(&self.u * v.conjugate())
    }

    pub fn apply_tensor(&self, v: &TensorVector) -> Result<TensorVector> {
        TensorVector::new(v.legs().to_vec(), self.apply(v.data())?)
    }

    /// `J₁ ⊗ J₂`, again antilinear.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            u: kron(&self.u, &other.u),
        }
    }

    /// ‖u·conj(u) − I‖: zero iff the operator is an involution.
    pub fn involution_residual(&self) -> f64 {
        let sq = self * self;
        let n = self.dim();
        operator_norm(&(sq - DMatrix::identity(n, n))).unwrap_or(f64::INFINITY)
    }

    pub fn unitarity_residual(&self) -> f64 {
        let n = self.dim();
        operator_norm(&(self.u.adjoint() * &self.u - DMatrix::identity(n, n)))
            .unwrap_or(f64::INFINITY)
    }

    /// The linear operator `J a J⁻¹ = u · conj(a) · u*`.
    pub fn conjugate(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        conj_by_antilinear(self, a)
    }
}

/// `J a J⁻¹` for antilinear `J = u·conj`.
///
/// For the conjugations used here (`J = J⁻¹`) this is the familiar `J a J`.
pub fn conj_by_antilinear(j: &AntilinearOp, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.nrows() != j.dim() || a.ncols() != j.dim() {
        return Err(Error::DimensionMismatch {
            context: "conjugated operator must match antilinear operator",
            expected: j.dim(),
            found: a.nrows(),
        });
    }
    Ok(&j.u * a.conjugate() * j.u.adjoint())
}

impl Mul<&AntilinearOp> for &AntilinearOp {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &AntilinearOp) -> ComplexMatrix {
        &self.u * rhs.u.conjugate()
    }
}

impl Mul<&ComplexMatrix> for &AntilinearOp {
    type Output = AntilinearOp;

    fn mul(self, rhs: &ComplexMatrix) -> AntilinearOp {
        AntilinearOp {
            u: &self.u * rhs.conjugate(),
        }
    }
}

impl Mul<&AntilinearOp> for &ComplexMatrix {
    type Output = AntilinearOp;

    fn mul(self, rhs: &AntilinearOp) -> AntilinearOp {
        AntilinearOp { u: self * &rhs.u }
    }
}
