//! Artin–Wedderburn decomposition of a finite-dimensional *-algebra and the
//! predual (quotient trace) norm it makes computable.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::{BiFunctional, Functional};
use crate::error::{Error, Result};
use crate::qgcore::AlgebraSpan;
use crate::rng::{derived, gaussian, random_self_adjoint, QgRng};
use crate::tensorlin::{hermitian_eigen, hs_inner, kron, trace_norm, ComplexMatrix};

const MAX_ATTEMPTS: usize = 6;
/// Eigenvalues closer than this (relative to the spread) are one cluster.
const CLUSTER_TOL: f64 = 1e-7;
const NULL_TOL: f64 = 1e-9;

/// One simple summand M_n ⊗ 1_m of the algebra.
#[derive(Clone, Debug)]
pub struct Block {
    /// n: the summand is M_n.
    pub size: usize,
    /// m: number of copies of ℂⁿ it acts on.
    pub multiplicity: usize,
    /// m isometries ℂⁿ → H, one per copy, in matched bases: every algebra
    /// element x satisfies V_k* x V_k = V_l* x V_l.
    pub isometries: Vec<ComplexMatrix>,
}

impl Block {
    /// Σ_k V_k* ρ V_k: the block of ρ that pairs against M_n.
    pub fn compress(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = DMatrix::zeros(self.size, self.size);
        for v in &self.isometries {
            out += v.adjoint() * rho * v;
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    dim: usize,
    blocks: Vec<Block>,
}

impl BlockDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Sorted block sizes n_i.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.blocks.iter().map(|b| b.size).collect();
        s.sort_unstable();
        s
    }

    /// Σ n_i²: the dimension of the algebra.
    pub fn algebra_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.size * b.size).sum()
    }

    /// Decomposition of A ⊗ B from those of A and B.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut blocks = Vec::with_capacity(self.blocks.len() * other.blocks.len());
        for a in &self.blocks {
            for b in &other.blocks {
                let isometries = a
                    .isometries
                    .iter()
                    .flat_map(|va| b.isometries.iter().map(move |vb| kron(va, vb)))
                    .collect();
                blocks.push(Block {
                    size: a.size * b.size,
                    multiplicity: a.multiplicity * b.multiplicity,
                    isometries,
                });
            }
        }
        Self {
            dim: self.dim * other.dim,
            blocks,
        }
    }

    /// sup{|tr(ρx)| : x ∈ M, ‖x‖ ≤ 1} = Σ_i ‖Σ_k V_k* ρ V_k‖₁.
    pub fn quotient_norm(&self, rho: &ComplexMatrix) -> Result<f64> {
        if rho.nrows() != self.dim {
            return Err(Error::MismatchedDecomposition {
                decomposition: self.dim,
                functional: rho.nrows(),
            });
        }
        self.blocks.iter().map(|b| trace_norm(&b.compress(rho))).sum()
    }
}

/// ‖ω‖ in M_*.
pub fn predual_norm(omega: &Functional, decomp: &BlockDecomposition) -> Result<f64> {
    decomp.quotient_norm(&omega.rho())
}

/// ‖x‖ in (M⊗̄M)_*, with `decomp` a decomposition of M⊗̄M.
pub fn tensor_predual_norm(x: &BiFunctional, decomp: &BlockDecomposition) -> Result<f64> {
    decomp.quotient_norm(&x.rho())
}

/// Group eigenvector indices by eigenvalue; `None` if the spectrum has a
/// near-degeneracy that cannot be told apart from a genuine multiplicity.
fn clusters(values: &DVector<f64>) -> Option<Vec<Vec<usize>>> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let spread = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let tol = CLUSTER_TOL * spread;
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    let mut min_gap = f64::INFINITY;
    for &i in &idx {
        let v = values[i];
        if v - last > tol {
            if last.is_finite() {
                min_gap = min_gap.min(v - last);
            }
            out.push(vec![i]);
        } else {
            out.last_mut()?.push(i);
        }
        last = v;
    }
    // Clusters must be well separated compared with the merge tolerance.
    (min_gap > 1e3 * tol).then_some(out)
}

fn columns(m: &ComplexMatrix, idx: &[usize]) -> ComplexMatrix {
    DMatrix::from_fn(m.nrows(), idx.len(), |r, c| m[(r, idx[c])])
}

/// Orthonormal basis (as matrices) of the center of span(basis).
fn center(span: &AlgebraSpan) -> Result<Vec<ComplexMatrix>> {
    let b = span.orthonormal_basis();
    let d = b.len();
    let comm: Vec<Vec<ComplexMatrix>> = b
        .iter()
        .map(|bi| b.iter().map(|bj| bi * bj - bj * bi).collect())
        .collect();
    // G_il = Σ_j ⟨[B_l, B_j], [B_i, B_j]⟩; its null space is the center.
    let mut g = DMatrix::<C64>::zeros(d, d);
    for i in 0..d {
        for l in 0..d {
            g[(i, l)] = (0..d).map(|j| hs_inner(&comm[l][j], &comm[i][j])).sum();
        }
    }
    let (vals, vecs) = hermitian_eigen(&g)?;
    let scale = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut out = Vec::new();
    for k in 0..d {
        if vals[k].abs() <= NULL_TOL * scale {
            let mut z = DMatrix::zeros(b[0].nrows(), b[0].ncols());
            for i in 0..d {
                z += &b[i] * vecs[(i, k)];
            }
            out.push(z);
        }
    }
    Ok(out)
}

/// Simultaneous block diagonalization of the *-algebra spanned by `basis`.
///
/// Central projections come from the spectrum of a random self-adjoint
/// central element; inside each central block a random self-adjoint algebra
/// element splits off the multiplicity space and a random element supplies
/// matrix units linking the copies. Degenerate draws are retried.
pub fn block_decompose(basis: &[ComplexMatrix]) -> Result<BlockDecomposition> {
    let span = AlgebraSpan::new(basis)?;
    let dim = span.orthonormal_basis()[0].nrows();
    let z = center(&span)?;
    if z.is_empty() {
        return Err(Error::DegenerateCenter { attempts: 0 });
    }
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = derived(attempt as u64, "block_decompose");
        if let Some(d) = try_decompose(&span, &z, dim, &mut rng)? {
            return Ok(d);
        }
    }
    Err(Error::DegenerateCenter {
        attempts: MAX_ATTEMPTS,
    })
}

fn try_decompose(
    span: &AlgebraSpan,
    z: &[ComplexMatrix],
    dim: usize,
    rng: &mut QgRng,
) -> Result<Option<BlockDecomposition>> {
    let h = random_self_adjoint(rng, z);
    let (vals, vecs) = hermitian_eigen(&h)?;
    let Some(central) = clusters(&vals) else {
        return Ok(None);
    };
    if central.len() != z.len() {
        return Ok(None);
    }
    let mut blocks = Vec::with_capacity(central.len());
    for cluster in &central {
        let q = columns(&vecs, cluster);
        let d = q.ncols();
        let compressed: Vec<ComplexMatrix> = span
            .orthonormal_basis()
            .iter()
            .map(|b| q.adjoint() * b * &q)
            // Basis elements are unit vectors, so tiny compressions are
            // rounding noise from other blocks.
            .filter(|c| c.norm() > NULL_TOL)
            .collect();
        let Ok(block_span) = AlgebraSpan::new(&compressed) else {
            return Ok(None);
        };
        let r = block_span.dim();
        let n = (r as f64).sqrt().round() as usize;
        if n * n != r || !d.is_multiple_of(n) {
            return Ok(None);
        }
        let m = d / n;
        let Some(isometries) = split_multiplicity(block_span.orthonormal_basis(), n, m, &q, rng)?
        else {
            return Ok(None);
        };
        blocks.push(Block {
            size: n,
            multiplicity: m,
            isometries,
        });
    }
    let total: usize = blocks.iter().map(|b| b.size * b.multiplicity).sum();
    if total != dim {
        return Ok(None);
    }
    Ok(Some(BlockDecomposition { dim, blocks }))
}

/// Inside a central block ≅ M_n ⊗ 1_m (given by orthonormal columns `q`),
/// find isometries V_1..V_m: ℂⁿ → H in matched bases.
fn split_multiplicity(
    algebra: &[ComplexMatrix],
    n: usize,
    m: usize,
    q: &ComplexMatrix,
    rng: &mut QgRng,
) -> Result<Option<Vec<ComplexMatrix>>> {
    let d = n * m;
    if n == 1 {
        // The block is scalar: any orthonormal basis of the copy space works.
        return Ok(Some((0..m).map(|k| q.columns(k, 1).into_owned()).collect()));
    }
    let a = random_self_adjoint(rng, algebra);
    let (vals, vecs) = hermitian_eigen(&a)?;
    let Some(eigenspaces) = clusters(&vals) else {
        return Ok(None);
    };
    if eigenspaces.len() != n || eigenspaces.iter().any(|c| c.len() != m) {
        return Ok(None);
    }
    let f: Vec<ComplexMatrix> = eigenspaces.iter().map(|c| columns(&vecs, c)).collect();
    // A generic b has P_j b P_1 ∝ e_{j1} ⊗ 1, mapping E_1 isometrically
    // (up to a common scalar) onto E_j.
    let b = algebra
        .iter()
        .fold(DMatrix::<C64>::zeros(d, d), |acc, x| acc + x * gaussian(rng));
    let mut g: Vec<Vec<nalgebra::DVector<C64>>> = vec![Vec::with_capacity(m); n];
    for k in 0..m {
        g[0].push(f[0].column(k).into_owned());
    }
    for j in 1..n {
        let pj = &f[j] * f[j].adjoint();
        let first = &pj * &b * f[0].column(0);
        let norm = first.norm();
        if norm < 1e-6 {
            return Ok(None);
        }
        for k in 0..m {
            g[j].push((&pj * &b * f[0].column(k)).unscale(norm));
        }
    }
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let cols: Vec<_> = (0..n).map(|j| g[j][k].clone()).collect();
        let local = DMatrix::from_columns(&cols);
        out.push(q * local);
    }
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupTable;
    use crate::qgcore::{dual, FiniteQuantumGroup};
    use crate::rng::{random_matrix, random_unit_vector, random_unitary, seeded};
    use crate::tensorlin::{matrix_unit, operator_norm, TensorVector};
    use crate::funalg::vector_state;

    fn diag_basis(n: usize) -> Vec<ComplexMatrix> {
        (0..n).map(|s| matrix_unit(n, s, s)).collect()
    }

    fn full_basis(n: usize) -> Vec<ComplexMatrix> {
        (0..n)
            .flat_map(|i| (0..n).map(move |j| matrix_unit(n, i, j)))
            .collect()
    }

    fn check_isometries(d: &BlockDecomposition, basis: &[ComplexMatrix]) {
        let mut rng = seeded(99);
        let x = crate::rng::random_combination(&mut rng, basis);
        for b in d.blocks() {
            // The block's support projection must be central.
            let p = b.isometries.iter().fold(DMatrix::<C64>::zeros(d.dim(), d.dim()), |acc, v| acc + v * v.adjoint());
            for y in basis {
                assert!((&p * y - y * &p).norm() <= 1e-10, "support projection not central");
            }
            let first = b.isometries[0].adjoint() * &x * &b.isometries[0];
            for v in &b.isometries {
                let id = DMatrix::<C64>::identity(b.size, b.size);
                let iso = operator_norm(&(v.adjoint() * v - id)).unwrap();
                let matched = operator_norm(&(v.adjoint() * &x * v - &first)).unwrap();
                assert!(iso <= 1e-10 && matched <= 1e-10, "isometry {iso:e}, matching {matched:e}");
            }
        }
    }

    #[test]
    fn diagonal_algebra_has_unit_blocks() {
        let d = block_decompose(&diag_basis(5)).unwrap();
        assert_eq!(d.sizes(), vec![1; 5]);
        assert_eq!(d.algebra_dim(), 5);
    }

    #[test]
    fn full_matrix_algebra_is_one_block() {
        let d = block_decompose(&full_basis(2)).unwrap();
        assert_eq!(d.sizes(), vec![2]);
        assert_eq!(d.blocks()[0].multiplicity, 1);
        check_isometries(&d, &full_basis(2));
    }

    #[test]
    fn s3_group_algebra_blocks() {
        let q = FiniteQuantumGroup::from_cayley_group_algebra(&GroupTable::symmetric3()).unwrap();
        let d = block_decompose(q.algebra_basis()).unwrap();
        assert_eq!(d.sizes(), vec![1, 1, 2]);
        for b in d.blocks() {
            assert_eq!(b.multiplicity, b.size);
        }
        assert_eq!(d.algebra_dim(), 6);
        check_isometries(&d, q.algebra_basis());
    }

    #[test]
    fn order_eight_group_algebras_have_matched_isometries() {
        for g in [GroupTable::dihedral4(), GroupTable::quaternion8()] {
            let q = FiniteQuantumGroup::from_cayley_group_algebra(&g).unwrap();
            let d = block_decompose(q.algebra_basis()).unwrap();
            assert_eq!(d.sizes(), vec![1, 1, 1, 1, 2]);
            check_isometries(&d, q.algebra_basis());
        }
    }

    #[test]
    fn rotated_multiplicity_algebra() {
        // U (M_2 ⊗ 1_3 ⊕ ℂ) U* on ℂ⁷.
        let mut rng = seeded(4);
        let u = random_unitary(&mut rng, 7);
        let mut basis = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                let mut e = DMatrix::<C64>::zeros(7, 7);
                e.view_mut((0, 0), (6, 6))
                    .copy_from(&kron(&matrix_unit(2, i, j), &DMatrix::identity(3, 3)));
                basis.push(&u * e * u.adjoint());
            }
        }
        basis.push(&u * matrix_unit(7, 6, 6) * u.adjoint());
        let d = block_decompose(&basis).unwrap();
        assert_eq!(d.sizes(), vec![1, 2]);
        let big = d.blocks().iter().find(|b| b.size == 2).unwrap();
        assert_eq!(big.multiplicity, 3);
        check_isometries(&d, &basis);
    }

    #[test]
    fn abelian_norm_is_l1() {
        let d = block_decompose(&diag_basis(4)).unwrap();
        let mut rng = seeded(5);
        let rho = random_matrix(&mut rng, 4);
        let want: f64 = (0..4).map(|i| rho[(i, i)].norm()).sum();
        assert!((d.quotient_norm(&rho).unwrap() - want).abs() <= 1e-12);
    }

    #[test]
    fn states_have_norm_one() {
        for q in [
            FiniteQuantumGroup::from_cayley_function_algebra(&GroupTable::symmetric3()).unwrap(),
            FiniteQuantumGroup::from_cayley_group_algebra(&GroupTable::symmetric3()).unwrap(),
        ] {
            let d = block_decompose(q.algebra_basis()).unwrap();
            let mut rng = seeded(6);
            let z = random_unit_vector(&mut rng, 6);
            let w = vector_state(&z).unwrap();
            assert!((predual_norm(&w, &d).unwrap() - 1.0).abs() <= 1e-10);

            let dd = d.tensor(&d);
            let v = random_unit_vector(&mut rng, 36).reshape(vec![6, 6]).unwrap();
            let x = BiFunctional::vector_state(&v).unwrap();
            assert!((tensor_predual_norm(&x, &dd).unwrap() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn tensor_decomposition_of_function_algebra_is_l1() {
        let q = FiniteQuantumGroup::from_cayley_function_algebra(&GroupTable::cyclic(3)).unwrap();
        let d = block_decompose(q.algebra_basis()).unwrap().tensor(&block_decompose(q.algebra_basis()).unwrap());
        let mut rng = seeded(7);
        let rho = random_matrix(&mut rng, 9);
        let want: f64 = (0..9).map(|i| rho[(i, i)].norm()).sum();
        assert!((d.quotient_norm(&rho).unwrap() - want).abs() <= 1e-12);
    }

    #[test]
    fn mismatched_decomposition_is_rejected() {
        let d = block_decompose(&diag_basis(3)).unwrap();
        let w = vector_state(&TensorVector::basis(4, 0)).unwrap();
        assert!(matches!(
            predual_norm(&w, &d),
            Err(Error::MismatchedDecomposition { decomposition: 3, functional: 4 })
        ));
    }

    #[test]
    fn dual_tensor_blocks_count() {
        let q = dual(&FiniteQuantumGroup::from_cayley_function_algebra(&GroupTable::symmetric3()).unwrap()).unwrap();
        let d = block_decompose(q.algebra_basis()).unwrap();
        let dd = d.tensor(&d);
        assert_eq!(dd.blocks().len(), 9);
        assert_eq!(dd.algebra_dim(), 36);
    }
}
