//! Dense complex linear algebra on tensor legs.

mod antilinear;
mod vector;

use faer::complex_native::c64;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub use antilinear::{conj_by_antilinear, AntilinearOp};
pub use vector::TensorVector;

pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Largest matrix side `kron` will produce.
pub const DEFAULT_KRON_CAP: usize = 4096;

const SVD_EPS: f64 = 1e-15;
const SVD_MAX_ITER: usize = 10_000;

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// `kron` that refuses to build matrices with more than `cap` rows or columns.
pub fn kron_capped(a: &ComplexMatrix, b: &ComplexMatrix, cap: usize) -> Result<ComplexMatrix> {
    let rows = a.nrows().checked_mul(b.nrows());
    let cols = a.ncols().checked_mul(b.ncols());
    match (rows, cols) {
        (Some(r), Some(c)) if r <= cap && c <= cap => Ok(kron(a, b)),
        (r, c) => Err(Error::DimensionCap {
            requested: r.unwrap_or(usize::MAX).max(c.unwrap_or(usize::MAX)),
            cap,
        }),
    }
}

/// The flip `v ⊗ w ↦ w ⊗ v` from ℂ^a ⊗ ℂ^b to ℂ^b ⊗ ℂ^a.
pub fn flip_sigma(dim_a: usize, dim_b: usize) -> ComplexMatrix {
    let n = dim_a * dim_b;
    let mut s = DMatrix::zeros(n, n);
    for i in 0..dim_a {
        for j in 0..dim_b {
            s[(j * dim_a + i, i * dim_b + j)] = C64::new(1.0, 0.0);
        }
    }
    s
}

/// Apply `op` to the listed legs of `v` (0-based), identity elsewhere.
///
/// `op` acts on `legs[0] ⊗ legs[1] ⊗ ...` in the order given, so `(1, 0)`
/// places the first tensor factor of `op` on leg 1. The full multi-leg
/// operator is never formed: each fibre over the untouched legs is gathered,
/// multiplied and scattered back.
pub fn apply_leg(op: &ComplexMatrix, legs: &[usize], v: &TensorVector) -> Result<TensorVector> {
    let shape = v.legs();
    let nl = shape.len();
    for (i, &l) in legs.iter().enumerate() {
        if l >= nl {
            return Err(Error::LegOutOfRange { leg: l, legs: nl });
        }
        if legs[..i].contains(&l) {
            return Err(Error::RepeatedLeg { leg: l });
        }
    }
    let sel_dims: Vec<usize> = legs.iter().map(|&l| shape[l]).collect();
    let sel: usize = sel_dims.iter().product();
    if op.nrows() != sel || op.ncols() != sel {
        return Err(Error::DimensionMismatch {
            context: "leg operator size",
            expected: sel,
            found: op.nrows(),
        });
    }
    let strides = vector::strides(shape);
    let sel_strides: Vec<usize> = legs.iter().map(|&l| strides[l]).collect();
    let sel_off = offsets(&sel_dims, &sel_strides);
    let rest: Vec<usize> = (0..nl).filter(|l| !legs.contains(l)).collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&l| shape[l]).collect();
    let rest_strides: Vec<usize> = rest.iter().map(|&l| strides[l]).collect();
    let base_off = offsets(&rest_dims, &rest_strides);

    // Nonzero pattern of op: permutation-like unitaries skip almost all work.
    let mut entries: Vec<Vec<(usize, C64)>> = vec![Vec::new(); sel];
    for r in 0..sel {
        for c in 0..sel {
            let x = op[(r, c)];
            if x != C64::new(0.0, 0.0) {
                entries[r].push((c, x));
            }
        }
    }

    let data = v.data();
    let mut out = DVector::zeros(data.len());
    let mut fibre = vec![C64::new(0.0, 0.0); sel];
    for &b in &base_off {
        for (slot, &o) in fibre.iter_mut().zip(&sel_off) {
            *slot = data[b + o];
        }
        for (row, &o) in entries.iter().zip(&sel_off) {
            let mut acc = C64::new(0.0, 0.0);
            for &(c, x) in row {
                acc += x * fibre[c];
            }
            out[b + o] = acc;
        }
    }
    TensorVector::new(shape.to_vec(), out)
}

/// Apply `op₁ ⊗ op₂ ⊗ ...` (one antilinear operator per leg) to `v`.
pub fn apply_antilinear_legs(ops: &[&AntilinearOp], v: &TensorVector) -> Result<TensorVector> {
    if ops.len() != v.legs().len() {
        return Err(Error::DimensionMismatch {
            context: "one antilinear operator per leg",
            expected: v.legs().len(),
            found: ops.len(),
        });
    }
    let mut out = v.conj();
    for (leg, op) in ops.iter().enumerate() {
        out = apply_leg(op.unitary_part(), &[leg], &out)?;
    }
    Ok(out)
}

fn offsets(dims: &[usize], strides: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for (&d, &s) in dims.iter().zip(strides) {
        out = out
            .iter()
            .flat_map(|&o| (0..d).map(move |k| o + k * s))
            .collect();
    }
    out
}

pub fn singular_values(a: &ComplexMatrix) -> Result<DVector<f64>> {
    if a.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    if a.is_empty() {
        return Ok(DVector::zeros(0));
    }
    a.clone()
        .try_svd(false, false, SVD_EPS, SVD_MAX_ITER)
        .map(|svd| svd.singular_values)
        .ok_or(Error::SvdNonConvergence)
}

fn to_faer(h: &ComplexMatrix) -> faer::Mat<c64> {
    faer::Mat::from_fn(h.nrows(), h.ncols(), |i, j| {
        let z = h[(i, j)];
        c64::new(z.re, z.im)
    })
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of the Hermitian
/// part of `h`.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<(DVector<f64>, ComplexMatrix)> {
    if h.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = to_faer(&sym).selfadjoint_eigendecomposition(faer::Side::Lower);
    let (s, u) = (eig.s().column_vector(), eig.u());
    let vals = DVector::from_fn(s.nrows(), |i, _| s.read(i).re);
    let vecs = DMatrix::from_fn(u.nrows(), u.ncols(), |i, j| {
        let z = u.read(i, j);
        C64::new(z.re, z.im)
    });
    Ok((vals, vecs))
}

/// Eigenvalues (ascending) of the Hermitian part of `h`.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    if h.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    Ok(to_faer(&sym).selfadjoint_eigenvalues(faer::Side::Lower))
}

/// Schatten-1 norm.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(a)?.sum())
}

/// Largest singular value.
pub fn operator_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(a)?.max())
}

pub fn is_unitary(a: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(a.is_square() && unitarity_residual(a)? <= tol)
}

pub fn unitarity_residual(a: &ComplexMatrix) -> Result<f64> {
    let n = a.ncols();
    operator_norm(&(a.adjoint() * a - DMatrix::identity(n, n)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SliceSide {
    /// `(ω ⊗ ι)(x)`: the functional eats the first leg.
    Left,
    /// `(ι ⊗ ω)(x)`: the functional eats the second leg.
    Right,
}

/// Slice of an operator on `H ⊗ H` by the vector functional
/// `ω(y) = ⟨y p, q⟩` on one leg.
///
/// Left: `[(ω⊗ι)(x)]_{kl} = ⟨x(p⊗e_l), q⊗e_k⟩`.
pub fn slice(
    side: SliceSide,
    p: &ComplexVector,
    q: &ComplexVector,
    x: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let n = p.len();
    if q.len() != n || x.nrows() != n * n || x.ncols() != n * n {
        return Err(Error::DimensionMismatch {
            context: "slice expects vectors on H and an operator on H⊗H",
            expected: n * n,
            found: x.nrows(),
        });
    }
    let mut out = DMatrix::zeros(n, n);
    for k in 0..n {
        for l in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    let (row, col) = match side {
                        SliceSide::Left => (i * n + k, j * n + l),
                        SliceSide::Right => (k * n + i, l * n + j),
                    };
                    acc += q[i].conj() * x[(row, col)] * p[j];
                }
            }
            out[(k, l)] = acc;
        }
    }
    Ok(out)
}

/// Slice by the vector state `ω_w = ⟨· w, w⟩`.
pub fn slice_state(side: SliceSide, w: &ComplexVector, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    slice(side, w, w, x)
}

/// Rank-one operator `|a⟩⟨b|`.
pub fn outer(a: &ComplexVector, b: &ComplexVector) -> ComplexMatrix {
    a * b.adjoint()
}

/// Unit column vector `e_i` in ℂⁿ.
pub fn basis_vector(n: usize, i: usize) -> ComplexVector {
    let mut v = DVector::zeros(n);
    v[i] = C64::new(1.0, 0.0);
    v
}

/// Matrix unit `E_{ij}` in Mₙ.
pub fn matrix_unit(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = DMatrix::zeros(n, n);
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

/// Hilbert–Schmidt inner product `tr(b* a)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    b.iter().zip(a.iter()).map(|(y, x)| y.conj() * x).sum()
}
