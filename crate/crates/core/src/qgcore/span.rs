use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::tensorlin::{hs_inner, kron, ComplexMatrix};

/// Relative threshold below which a Gram–Schmidt remainder counts as dependent.
const DEPENDENCE_TOL: f64 = 1e-9;

/// Hilbert–Schmidt orthonormal basis of span(basis).
#[derive(Clone, Debug)]
pub struct AlgebraSpan {
    ortho: Vec<ComplexMatrix>,
    rows: usize,
    cols: usize,
}

impl AlgebraSpan {
    pub fn new(basis: &[ComplexMatrix]) -> Result<Self> {
        let first = basis.first().ok_or(Error::EmptyBasis)?;
        let (rows, cols) = first.shape();
        let mut ortho: Vec<ComplexMatrix> = Vec::new();
        for b in basis {
            if b.shape() != (rows, cols) {
                return Err(Error::DimensionMismatch {
                    context: "basis elements must share a shape",
                    expected: rows,
                    found: b.nrows(),
                });
            }
            let scale = b.norm();
            if scale == 0.0 {
                continue;
            }
            let mut r = b.clone();
            // Two passes keep the basis orthonormal to machine precision.
            for _ in 0..2 {
                for o in &ortho {
                    r -= o * hs_inner(&r, o);
                }
            }
            let n = r.norm();
            if n > DEPENDENCE_TOL * scale {
                ortho.push(r.unscale(n));
            }
        }
        if ortho.is_empty() {
            return Err(Error::EmptyBasis);
        }
        Ok(Self { ortho, rows, cols })
    }

    pub fn dim(&self) -> usize {
        self.ortho.len()
    }

    pub fn orthonormal_basis(&self) -> &[ComplexMatrix] {
        &self.ortho
    }

    pub fn coefficients(&self, x: &ComplexMatrix) -> Vec<C64> {
        self.ortho.iter().map(|o| hs_inner(x, o)).collect()
    }

    /// Hilbert–Schmidt orthogonal projection onto the span.
    pub fn project(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_shape(x)?;
        let mut out = DMatrix::zeros(self.rows, self.cols);
        for o in &self.ortho {
            out += o * hs_inner(x, o);
        }
        Ok(out)
    }

    /// ‖x − P(x)‖ / ‖x‖ in Hilbert–Schmidt norm; zero for x = 0.
    pub fn residual(&self, x: &ComplexMatrix) -> Result<f64> {
        let norm = x.norm();
        if norm == 0.0 {
            self.check_shape(x)?;
            return Ok(0.0);
        }
        Ok((x - self.project(x)?).norm() / norm)
    }

    pub fn contains(&self, x: &ComplexMatrix, tol: f64) -> Result<bool> {
        Ok(self.residual(x)? <= tol)
    }

    fn check_shape(&self, x: &ComplexMatrix) -> Result<()> {
        if x.shape() != (self.rows, self.cols) {
            return Err(Error::DimensionMismatch {
                context: "matrix shape differs from algebra",
                expected: self.rows,
                found: x.nrows(),
            });
        }
        Ok(())
    }
}

/// Least-squares distance from `x` to span(basis), relative to ‖x‖.
pub fn membership_residual(basis: &[ComplexMatrix], x: &ComplexMatrix) -> Result<f64> {
    AlgebraSpan::new(basis)?.residual(x)
}

/// span{a ⊗ b} for a ∈ A, b ∈ B, handled through the factors' orthonormal
/// bases so the n⁴-element product basis is never listed.
#[derive(Clone, Debug)]
pub struct TensorSpan {
    left: AlgebraSpan,
    right: AlgebraSpan,
}

impl TensorSpan {
    pub fn new(left: AlgebraSpan, right: AlgebraSpan) -> Self {
        Self { left, right }
    }

    pub fn left(&self) -> &AlgebraSpan {
        &self.left
    }

    pub fn right(&self) -> &AlgebraSpan {
        &self.right
    }

    pub fn dim(&self) -> usize {
        self.left.dim() * self.right.dim()
    }

    /// Coefficients `c[i][j] = ⟨x, a_i ⊗ b_j⟩_HS`.
    fn coefficients(&self, x: &ComplexMatrix) -> Result<Vec<Vec<C64>>> {
        let (ra, ca) = (self.left.rows, self.left.cols);
        let (rb, cb) = (self.right.rows, self.right.cols);
        if x.shape() != (ra * rb, ca * cb) {
            return Err(Error::DimensionMismatch {
                context: "operator shape differs from tensor algebra",
                expected: ra * rb,
                found: x.nrows(),
            });
        }
        let mut out = Vec::with_capacity(self.left.dim());
        for a in self.left.orthonormal_basis() {
            // Partial pairing with a on the first leg.
            let mut t = DMatrix::<C64>::zeros(rb, cb);
            for i in 0..ra {
                for k in 0..ca {
                    let ac = a[(i, k)].conj();
                    if ac == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for j in 0..rb {
                        for l in 0..cb {
                            t[(j, l)] += ac * x[(i * rb + j, k * cb + l)];
                        }
                    }
                }
            }
            out.push(self.right.coefficients(&t));
        }
        Ok(out)
    }

    pub fn project(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let c = self.coefficients(x)?;
        let mut out = DMatrix::zeros(x.nrows(), x.ncols());
        for (a, row) in self.left.orthonormal_basis().iter().zip(&c) {
            let mut b_sum = DMatrix::zeros(self.right.rows, self.right.cols);
            for (b, cij) in self.right.orthonormal_basis().iter().zip(row) {
                b_sum += b * *cij;
            }
            out += kron(a, &b_sum);
        }
        Ok(out)
    }

    pub fn residual(&self, x: &ComplexMatrix) -> Result<f64> {
        let p = self.project(x)?;
        let norm = x.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        Ok((x - p).norm() / norm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{gaussian, random_combination, random_matrix, seeded};
    use crate::tensorlin::matrix_unit;

    fn diagonal_units(n: usize) -> Vec<ComplexMatrix> {
        (0..n).map(|s| matrix_unit(n, s, s)).collect()
    }

    #[test]
    fn membership_simple_cases() {
        let basis = diagonal_units(3);
        assert!(membership_residual(&basis, &basis[0]).unwrap() <= 1e-15);
        let off = matrix_unit(3, 0, 1);
        assert!((membership_residual(&basis, &off).unwrap() - 1.0).abs() <= 1e-15);
        let mut rng = seeded(1);
        let x = random_combination(&mut rng, &basis);
        assert!(membership_residual(&basis, &x).unwrap() <= 1e-12);
        assert!(matches!(membership_residual(&[], &off), Err(Error::EmptyBasis)));
    }

    #[test]
    fn dependent_elements_are_dropped() {
        let mut basis = diagonal_units(2);
        basis.push(&basis[0] * C64::new(2.0, 1.0) + &basis[1]);
        assert_eq!(AlgebraSpan::new(&basis).unwrap().dim(), 2);
    }

    #[test]
    fn tensor_span_agrees_with_product_basis() {
        let mut rng = seeded(2);
        let a: Vec<_> = (0..2).map(|_| random_matrix(&mut rng, 2)).collect();
        let b: Vec<_> = (0..3).map(|_| random_matrix(&mut rng, 2)).collect();
        let ts = TensorSpan::new(AlgebraSpan::new(&a).unwrap(), AlgebraSpan::new(&b).unwrap());
        let product: Vec<_> = a.iter().flat_map(|x| b.iter().map(move |y| kron(x, y))).collect();
        let flat = AlgebraSpan::new(&product).unwrap();
        for _ in 0..5 {
            let x = random_matrix(&mut rng, 4);
            let r1 = ts.residual(&x).unwrap();
            let r2 = flat.residual(&x).unwrap();
            assert!((r1 - r2).abs() <= 1e-10);
            assert!((ts.project(&x).unwrap() - flat.project(&x).unwrap()).norm() <= 1e-10);
        }
        let member = kron(&a[0], &b[1]) * gaussian(&mut rng) + kron(&a[1], &b[2]);
        assert!(ts.residual(&member).unwrap() <= 1e-12);
    }
}
