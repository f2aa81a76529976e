//! Brute-force reference values used by tests and the acceptance target.
//! Nothing here shares code with the block decomposition.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::qgcore::AlgebraSpan;
use crate::rng::{random_combination, seeded, QgRng};
use crate::tensorlin::{hs_inner, ComplexMatrix};

/// Outcome of a randomized search for sup{|tr(ρx)| : x ∈ M, ‖x‖ ≤ 1}.
#[derive(Clone, Debug)]
pub struct SupEstimate {
    /// Best value after projected-gradient refinement.
    pub best: f64,
    /// Value at every random starting contraction.
    pub samples: Vec<f64>,
}

/// Frobenius-nearest contraction: singular values clipped at 1. For x in a
/// *-algebra the result stays in the algebra.
fn clip(x: &ComplexMatrix) -> ComplexMatrix {
    let svd = x.clone().svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let s = DMatrix::from_diagonal(&svd.singular_values.map(|v| C64::new(v.min(1.0), 0.0)));
    u * s * vt
}

fn pairing(rho: &ComplexMatrix, x: &ComplexMatrix) -> C64 {
    (rho * x).trace()
}

/// Random contractions u·v* from the unitary parts of random algebra
/// elements, then projected gradient ascent from the best `ascents` starts.
pub fn sup_pairing(
    basis: &[ComplexMatrix],
    rho: &ComplexMatrix,
    starts: usize,
    ascents: usize,
    seed: u64,
) -> Result<SupEstimate> {
    let span = AlgebraSpan::new(basis)?;
    let mut rng: QgRng = seeded(seed);
    let mut pool: Vec<(f64, ComplexMatrix)> = Vec::with_capacity(starts);
    for _ in 0..starts {
        let y = random_combination(&mut rng, span.orthonormal_basis());
        let svd = y.svd(true, true);
        let x = svd.u.unwrap() * svd.v_t.unwrap();
        pool.push((pairing(rho, &x).norm(), x));
    }
    let samples: Vec<f64> = pool.iter().map(|p| p.0).collect();
    pool.sort_by(|a, b| b.0.total_cmp(&a.0));

    let grad = span.project(&rho.adjoint())?;
    let gnorm = grad.norm();
    let mut best = samples.iter().copied().fold(0.0, f64::max);
    if gnorm == 0.0 {
        return Ok(SupEstimate { best, samples });
    }
    for (_, start) in pool.into_iter().take(ascents) {
        let mut x = start;
        for step in 0..100 {
            let v = pairing(rho, &x);
            let phase = if v.norm() > 0.0 { v / v.norm() } else { C64::new(1.0, 0.0) };
            let eta = (1.0 + step as f64) / gnorm;
            x = clip(&(&x + &grad * (phase * eta)));
            best = best.max(pairing(rho, &x).norm());
        }
    }
    Ok(SupEstimate { best, samples })
}

/// |ω(x)| evaluated through the HS inner product; a cross-check for
/// `Functional::evaluate`.
pub fn dense_pairing(rho: &ComplexMatrix, x: &ComplexMatrix) -> C64 {
    hs_inner(x, &rho.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funalg::block_decompose;
    use crate::rng::random_matrix;
    use crate::tensorlin::{matrix_unit, trace_norm};

    #[test]
    fn oracle_recovers_trace_norm_on_full_algebra() {
        let basis: Vec<_> = (0..3)
            .flat_map(|i| (0..3).map(move |j| matrix_unit(3, i, j)))
            .collect();
        let rho = random_matrix(&mut seeded(1), 3);
        let est = sup_pairing(&basis, &rho, 200, 3, 2).unwrap();
        let exact = trace_norm(&rho).unwrap();
        assert!(est.samples.iter().all(|&s| s <= exact + 1e-12));
        assert!((est.best - exact).abs() <= 1e-4);
    }

    #[test]
    fn oracle_matches_block_norm_on_diagonal() {
        let basis: Vec<_> = (0..4).map(|s| matrix_unit(4, s, s)).collect();
        let rho = random_matrix(&mut seeded(3), 4);
        let d = block_decompose(&basis).unwrap();
        let est = sup_pairing(&basis, &rho, 200, 3, 4).unwrap();
        assert!((est.best - d.quotient_norm(&rho).unwrap()).abs() <= 1e-4);
    }
}
