//! Finite quantum groups: the multiplicative unitary, modular conjugations and
//! the von Neumann algebra, plus the unitaries derived from them.

pub mod catalog;
mod span;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::group::GroupTable;
use crate::report::Label;
use crate::rng::{derived, random_unit_vector};
use crate::tensorlin::{
    apply_leg, conj_by_antilinear, flip_sigma, kron, slice, unitarity_residual, AntilinearOp,
    ComplexMatrix, SliceSide, TensorVector, basis_vector,
};

pub use catalog::{
    matrix_residual, vector_residual, verify_structure_identities, Atom, CatalogEntry, Expr, Modular, UnitaryTable,
};
pub use span::{membership_residual, AlgebraSpan, TensorSpan};

/// Tolerance used when validating inputs to constructors.
pub const STRUCTURE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Construction {
    /// L^∞(G): diagonal matrices on ℓ²(G).
    FunctionAlgebra,
    /// The group von Neumann algebra, the dual of the function algebra.
    GroupAlgebra,
    Generic,
}

impl Construction {
    pub fn label(self) -> &'static str {
        match self {
            Construction::FunctionAlgebra => "function-algebra",
            Construction::GroupAlgebra => "group-algebra",
            Construction::Generic => "generic",
        }
    }

    pub fn dual(self) -> Self {
        match self {
            Construction::FunctionAlgebra => Construction::GroupAlgebra,
            Construction::GroupAlgebra => Construction::FunctionAlgebra,
            Construction::Generic => Construction::Generic,
        }
    }
}

/// Raw data for [`FiniteQuantumGroup::new`].
#[derive(Clone, Debug)]
pub struct QuantumGroupParts {
    pub name: String,
    pub w: ComplexMatrix,
    pub j: AntilinearOp,
    pub jhat: AntilinearOp,
    pub haar_vector: TensorVector,
    pub nu: f64,
    pub algebra_basis: Vec<ComplexMatrix>,
}

#[derive(Clone, Debug)]
pub struct FiniteQuantumGroup {
    name: String,
    dim: usize,
    w: ComplexMatrix,
    j: AntilinearOp,
    jhat: AntilinearOp,
    haar_vector: TensorVector,
    nu: f64,
    algebra_basis: Vec<ComplexMatrix>,
    span: AlgebraSpan,
    construction: Construction,
}

impl FiniteQuantumGroup {
    /// Validate and assemble a quantum group from raw data.
    ///
    /// Checks: W unitary, pentagonal on random vectors, J and Ĵ with unitary
    /// parts, ν > 0, and the basis spanning a unital *-algebra.
    pub fn new(parts: QuantumGroupParts) -> Result<Self> {
        Self::assemble(parts, Construction::Generic)
    }

    fn assemble(parts: QuantumGroupParts, construction: Construction) -> Result<Self> {
        let dim = parts.j.dim();
        let expect = |context, found| {
            if found != dim {
                Err(Error::DimensionMismatch { context, expected: dim, found })
            } else {
                Ok(())
            }
        };
        expect("Ĵ dimension", parts.jhat.dim())?;
        expect("haar vector length", parts.haar_vector.len())?;
        if parts.w.nrows() != dim * dim || parts.w.ncols() != dim * dim {
            return Err(Error::DimensionMismatch {
                context: "W acts on H⊗H",
                expected: dim * dim,
                found: parts.w.nrows(),
            });
        }
        for b in &parts.algebra_basis {
            expect("algebra basis element", b.nrows())?;
        }
        if !(parts.nu > 0.0 && parts.nu.is_finite()) {
            return Err(Error::StructureViolation {
                check: "scaling constant positive",
                residual: parts.nu,
            });
        }
        let unitary = unitarity_residual(&parts.w)?;
        if unitary > STRUCTURE_TOL {
            return Err(Error::NotUnitary { residual: unitary });
        }
        for op in [&parts.j, &parts.jhat] {
            let r = op.unitarity_residual();
            if r > STRUCTURE_TOL {
                return Err(Error::NotUnitary { residual: r });
            }
        }
        let pentagon = pentagon_residual(&parts.w, dim, 0, 3)?;
        if pentagon > STRUCTURE_TOL {
            return Err(Error::StructureViolation {
                check: "pentagonal equation",
                residual: pentagon,
            });
        }
        let span = AlgebraSpan::new(&parts.algebra_basis)?;
        let closure = star_algebra_residual(&span)?;
        if closure > STRUCTURE_TOL {
            return Err(Error::StructureViolation {
                check: "basis spans a unital *-algebra",
                residual: closure,
            });
        }
        Ok(Self {
            name: parts.name,
            dim,
            w: parts.w,
            j: parts.j,
            jhat: parts.jhat,
            haar_vector: parts.haar_vector,
            nu: parts.nu,
            algebra_basis: parts.algebra_basis,
            span,
            construction,
        })
    }

    /// L^∞(G) on ℓ²(G) with W(e_a ⊗ e_b) = e_a ⊗ e_{ab}.
    pub fn from_cayley_function_algebra(g: &GroupTable) -> Result<Self> {
        let n = g.order();
        let mut w = DMatrix::zeros(n * n, n * n);
        for a in 0..n {
            for b in 0..n {
                w[(a * n + g.mul(a, b), a * n + b)] = C64::new(1.0, 0.0);
            }
        }
        let parts = QuantumGroupParts {
            name: g.name().to_string(),
            w,
            j: AntilinearOp::conjugation(n),
            jhat: AntilinearOp::permuted_conjugation(g.inverses()),
            haar_vector: TensorVector::from_real(&vec![1.0; n]),
            nu: 1.0,
            algebra_basis: (0..n).map(|s| crate::tensorlin::matrix_unit(n, s, s)).collect(),
        };
        Self::assemble(parts, Construction::FunctionAlgebra)
    }

    /// The group von Neumann algebra of `g`, i.e. the dual of its function algebra.
    pub fn from_cayley_group_algebra(g: &GroupTable) -> Result<Self> {
        dual(&Self::from_cayley_function_algebra(g)?)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn w(&self) -> &ComplexMatrix {
        &self.w
    }

    pub fn j(&self) -> &AntilinearOp {
        &self.j
    }

    pub fn jhat(&self) -> &AntilinearOp {
        &self.jhat
    }

    pub fn haar_vector(&self) -> &TensorVector {
        &self.haar_vector
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn algebra_basis(&self) -> &[ComplexMatrix] {
        &self.algebra_basis
    }

    pub fn span(&self) -> &AlgebraSpan {
        &self.span
    }

    pub fn tensor_span(&self) -> TensorSpan {
        TensorSpan::new(self.span.clone(), self.span.clone())
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn label(&self) -> Label {
        Label {
            group: self.name.clone(),
            construction: self.construction.label().to_string(),
        }
    }

    pub fn membership_residual(&self, x: &ComplexMatrix) -> Result<f64> {
        self.span.residual(x)
    }
}

fn star_algebra_residual(span: &AlgebraSpan) -> Result<f64> {
    let basis = span.orthonormal_basis();
    let n = basis[0].nrows();
    let mut worst = span.residual(&DMatrix::identity(n, n))?;
    for a in basis {
        worst = worst.max(span.residual(&a.adjoint())?);
        for b in basis {
            worst = worst.max(span.residual(&(a * b))?);
        }
    }
    Ok(worst)
}

/// max over random unit vectors of ‖(W₁₂W₁₃W₂₃ − W₂₃W₁₂)v‖.
pub fn pentagon_residual(w: &ComplexMatrix, dim: usize, seed: u64, draws: usize) -> Result<f64> {
    let mut rng = derived(seed, "pentagon");
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let v = random_unit_vector(&mut rng, dim * dim * dim).reshape(vec![dim; 3])?;
        let lhs = apply_leg(w, &[0, 1], &apply_leg(w, &[0, 2], &apply_leg(w, &[1, 2], &v)?)?)?;
        let rhs = apply_leg(w, &[1, 2], &apply_leg(w, &[0, 1], &v)?)?;
        worst = worst.max(lhs.distance(&rhs)?);
    }
    Ok(worst)
}

/// 𝔾̂ on the same Hilbert space: Ŵ = ΣW*Σ, M̂ spanned by the slices
/// (ω_{e_i,e_j} ⊗ ι)(W), with J and Ĵ exchanged.
pub fn dual(q: &FiniteQuantumGroup) -> Result<FiniteQuantumGroup> {
    let n = q.dim;
    let sigma = flip_sigma(n, n);
    let w_hat = &sigma * q.w.adjoint() * &sigma;
    let slices: Vec<ComplexMatrix> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| slice(SliceSide::Left, &basis_vector(n, j), &basis_vector(n, i), &q.w))
        .collect::<Result<_>>()?;
    // Keep a linearly independent subfamily of the raw slices.
    let mut basis: Vec<ComplexMatrix> = Vec::new();
    let mut dim_so_far = 0;
    for s in slices {
        if s.norm() == 0.0 {
            continue;
        }
        let mut trial = basis.clone();
        trial.push(s.clone());
        let d = AlgebraSpan::new(&trial)?.dim();
        if d > dim_so_far {
            basis.push(s);
            dim_so_far = d;
        }
    }
    if basis.is_empty() {
        return Err(Error::SliceSpanDegenerate);
    }
    let haar_vector = match q.construction {
        Construction::FunctionAlgebra => TensorVector::basis(n, 0),
        Construction::GroupAlgebra => TensorVector::from_real(&vec![1.0; n]),
        Construction::Generic => q.haar_vector.clone(),
    };
    let parts = QuantumGroupParts {
        name: q.name.clone(),
        w: w_hat,
        j: q.jhat.clone(),
        jhat: q.j.clone(),
        haar_vector,
        nu: q.nu,
        algebra_basis: basis,
    };
    FiniteQuantumGroup::assemble(parts, q.construction.dual()).map_err(|e| match e {
        Error::StructureViolation { check: "basis spans a unital *-algebra", .. } => {
            Error::SliceSpanDegenerate
        }
        other => other,
    })
}

/// Γ(x) = W*(1 ⊗ x)W for x ∈ M.
pub fn comultiply(q: &FiniteQuantumGroup, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let residual = q.membership_residual(x)?;
    if residual > STRUCTURE_TOL {
        return Err(Error::NotInAlgebra { residual });
    }
    Ok(comultiply_unchecked(q, x))
}

pub(crate) fn comultiply_unchecked(q: &FiniteQuantumGroup, x: &ComplexMatrix) -> ComplexMatrix {
    let n = q.dim;
    q.w.adjoint() * kron(&DMatrix::identity(n, n), x) * &q.w
}

/// The unitaries derived from (W, J, Ĵ) by the standard relations.
#[derive(Clone, Debug)]
pub struct DerivedUnitaries {
    /// W' = (J⊗J)W(J⊗J), the commutant quantum group.
    pub w_prime: ComplexMatrix,
    /// W^op = (Ĵ⊗Ĵ)W(Ĵ⊗Ĵ), the opposite quantum group.
    pub w_op: ComplexMatrix,
    /// Ŵ = ΣW*Σ.
    pub w_hat: ComplexMatrix,
    /// V = (Ĵ⊗Ĵ)ΣW*Σ(Ĵ⊗Ĵ), the right regular representation.
    pub v: ComplexMatrix,
    /// V̂, computed as the V of the dual: (Ĵ_d⊗Ĵ_d)ΣŴ*Σ(Ĵ_d⊗Ĵ_d) with Ĵ_d = J.
    pub v_hat: ComplexMatrix,
    /// W'^op = (J⊗J)W^op(J⊗J).
    pub w_prime_op: ComplexMatrix,
}

pub fn derived_unitaries(q: &FiniteQuantumGroup) -> Result<DerivedUnitaries> {
    let n = q.dim;
    let sigma = flip_sigma(n, n);
    let jj = q.j.tensor(&q.j);
    let hh = q.jhat.tensor(&q.jhat);
    let w_prime = conj_by_antilinear(&jj, &q.w)?;
    let w_op = conj_by_antilinear(&hh, &q.w)?;
    let w_hat = &sigma * q.w.adjoint() * &sigma;
    let v = conj_by_antilinear(&hh, &w_hat)?;
    // V of the dual, whose Ĵ is our J.
    let v_hat = conj_by_antilinear(&jj, &(&sigma * w_hat.adjoint() * &sigma))?;
    let w_prime_op = conj_by_antilinear(&jj, &w_op)?;
    Ok(DerivedUnitaries {
        w_prime,
        w_op,
        w_hat,
        v,
        v_hat,
        w_prime_op,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_combination, seeded};
    use crate::tensorlin::{matrix_unit, operator_norm};

    fn z(n: usize) -> FiniteQuantumGroup {
        FiniteQuantumGroup::from_cayley_function_algebra(&GroupTable::cyclic(n)).unwrap()
    }

    #[test]
    fn z2_multiplicative_unitary_is_explicit() {
        let q = z(2);
        let mut want = DMatrix::<C64>::zeros(4, 4);
        for (r, c) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            want[(r, c)] = C64::new(1.0, 0.0);
        }
        assert_eq!(q.w(), &want);
    }

    #[test]
    fn trivial_group_is_scalar() {
        let q = z(1);
        assert_eq!(q.w(), &DMatrix::identity(1, 1));
        let d = dual(&q).unwrap();
        assert_eq!(d.w(), q.w());
        assert_eq!(d.span().dim(), 1);
    }

    #[test]
    fn w_is_a_permutation_matrix() {
        for g in GroupTable::builtins() {
            let q = FiniteQuantumGroup::from_cayley_function_algebra(&g).unwrap();
            let w = q.w();
            for r in 0..w.nrows() {
                let row: Vec<_> = w.row(r).iter().copied().collect();
                assert_eq!(row.iter().filter(|x| **x == C64::new(1.0, 0.0)).count(), 1);
                assert!(row.iter().all(|x| *x == C64::new(0.0, 0.0) || *x == C64::new(1.0, 0.0)));
            }
        }
    }

    #[test]
    fn dual_of_z2_is_circulant() {
        let d = dual(&z(2)).unwrap();
        assert_eq!(d.construction(), Construction::GroupAlgebra);
        assert_eq!(d.span().dim(), 2);
        let swap = matrix_unit(2, 0, 1) + matrix_unit(2, 1, 0);
        let circulant = DMatrix::identity(2, 2) * C64::new(0.3, 0.1) + swap * C64::new(-1.2, 2.0);
        assert!(d.membership_residual(&circulant).unwrap() <= 1e-12);
        assert!(d.membership_residual(&matrix_unit(2, 0, 0)).unwrap() > 0.5);
    }

    #[test]
    fn biduality() {
        for g in [GroupTable::cyclic(3), GroupTable::symmetric3()] {
            let q = FiniteQuantumGroup::from_cayley_function_algebra(&g).unwrap();
            let dd = dual(&dual(&q).unwrap()).unwrap();
            assert!(operator_norm(&(dd.w() - q.w())).unwrap() <= 1e-10);
            assert_eq!(dd.construction(), Construction::FunctionAlgebra);
            assert_eq!(dd.span().dim(), q.span().dim());
        }
    }

    #[test]
    fn comultiplication_on_z2() {
        let q = z(2);
        let x = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(2.0, 0.0),
            C64::new(-5.0, 1.0),
        ]));
        let gx = comultiply(&q, &x).unwrap();
        for s in 0..2 {
            for t in 0..2 {
                assert_eq!(gx[(s * 2 + t, s * 2 + t)], x[((s + t) % 2, (s + t) % 2)]);
            }
        }
        let id = DMatrix::identity(2, 2);
        assert_eq!(comultiply(&q, &id).unwrap(), DMatrix::identity(4, 4));
        assert!(matches!(
            comultiply(&q, &matrix_unit(2, 0, 1)),
            Err(Error::NotInAlgebra { .. })
        ));
    }

    #[test]
    fn comultiplication_is_function_composition() {
        let g = GroupTable::symmetric3();
        let q = FiniteQuantumGroup::from_cayley_function_algebra(&g).unwrap();
        let mut rng = seeded(3);
        let x = random_combination(&mut rng, q.algebra_basis());
        let gx = comultiply(&q, &x).unwrap();
        for s in 0..6 {
            for t in 0..6 {
                let st = g.mul(s, t);
                assert!((gx[(s * 6 + t, s * 6 + t)] - x[(st, st)]).norm() <= 1e-14);
            }
        }
    }

    #[test]
    fn function_algebra_commutant_is_itself() {
        for g in GroupTable::builtins() {
            let q = FiniteQuantumGroup::from_cayley_function_algebra(&g).unwrap();
            let d = derived_unitaries(&q).unwrap();
            assert_eq!(&d.w_prime, q.w());
            assert!(operator_norm(&(&d.v_hat - &d.w_prime)).unwrap() <= 1e-14);
            for u in [&d.w_prime, &d.w_op, &d.w_hat, &d.v, &d.v_hat, &d.w_prime_op] {
                assert!(unitarity_residual(u).unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn generic_constructor_rejects_bad_data() {
        let q = z(3);
        let mut parts = QuantumGroupParts {
            name: "bad".into(),
            w: q.w().clone(),
            j: q.j().clone(),
            jhat: q.jhat().clone(),
            haar_vector: q.haar_vector().clone(),
            nu: 1.0,
            algebra_basis: q.algebra_basis().to_vec(),
        };
        let g = FiniteQuantumGroup::new(parts.clone()).unwrap();
        assert_eq!(g.construction(), Construction::Generic);

        parts.w[(0, 0)] = C64::new(2.0, 0.0);
        assert!(matches!(FiniteQuantumGroup::new(parts.clone()), Err(Error::NotUnitary { .. })));

        parts.w = crate::rng::random_unitary(&mut seeded(4), 9);
        assert!(matches!(
            FiniteQuantumGroup::new(parts.clone()),
            Err(Error::StructureViolation { check: "pentagonal equation", .. })
        ));

        parts.w = q.w().clone();
        parts.algebra_basis = vec![matrix_unit(3, 0, 1)];
        assert!(matches!(
            FiniteQuantumGroup::new(parts),
            Err(Error::StructureViolation { .. })
        ));
    }
}
