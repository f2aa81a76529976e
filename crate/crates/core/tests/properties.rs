//! Property tests for the predual norm, convolution and leg application.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use qglab_core::diagonals::{sa_residual, DiagonalContext, NetVector};
use qglab_core::funalg::{block_decompose, convolve, predual_norm, BlockDecomposition, Functional};
use qglab_core::group::GroupTable;
use qglab_core::qgcore::FiniteQuantumGroup;
use qglab_core::rng::{random_combination, random_matrix, random_unit_vector, random_vector, seeded};
use qglab_core::tensorlin::{apply_leg, kron, operator_norm, ComplexMatrix, TensorVector};

fn s3(group_algebra: bool) -> FiniteQuantumGroup {
    let g = GroupTable::symmetric3();
    if group_algebra {
        FiniteQuantumGroup::from_cayley_group_algebra(&g).unwrap()
    } else {
        FiniteQuantumGroup::from_cayley_function_algebra(&g).unwrap()
    }
}

fn functional(seed: u64, n: usize) -> Functional {
    Functional::from_rho(&random_matrix(&mut seeded(seed), n))
}

fn norm(f: &Functional, d: &BlockDecomposition) -> f64 {
    predual_norm(f, d).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn predual_norm_is_a_seminorm(sa in any::<u64>(), sb in any::<u64>(), re in -3.0f64..3.0, im in -3.0f64..3.0, ga in any::<bool>()) {
        let q = s3(ga);
        let d = block_decompose(q.algebra_basis()).unwrap();
        let (a, b) = (functional(sa, 6), functional(sb, 6));
        let sum = a.add(&b).unwrap();
        prop_assert!(norm(&sum, &d) <= norm(&a, &d) + norm(&b, &d) + 1e-10);
        let c = C64::new(re, im);
        prop_assert!((norm(&a.scale(c), &d) - c.norm() * norm(&a, &d)).abs() <= 1e-10 * (1.0 + c.norm()));
    }

    #[test]
    fn pairing_with_unit_ball_is_bounded_by_norm(sa in any::<u64>(), sx in any::<u64>(), ga in any::<bool>()) {
        let q = s3(ga);
        let d = block_decompose(q.algebra_basis()).unwrap();
        let a = functional(sa, 6);
        let x = random_combination(&mut seeded(sx), q.algebra_basis());
        let x = &x * C64::new(1.0 / operator_norm(&x).unwrap(), 0.0);
        prop_assert!(a.evaluate(&x).unwrap().norm() <= norm(&a, &d) + 1e-10);
    }

    #[test]
    fn convolution_is_contractive(sa in any::<u64>(), sb in any::<u64>(), ga in any::<bool>()) {
        let q = s3(ga);
        let d = block_decompose(q.algebra_basis()).unwrap();
        let (a, b) = (functional(sa, 6), functional(sb, 6));
        let ab = convolve(&q, &a, &b).unwrap();
        prop_assert!(norm(&ab, &d) <= norm(&a, &d) * norm(&b, &d) + 1e-10);
    }

    #[test]
    fn convolution_matches_dense_coproduct(sa in any::<u64>(), sb in any::<u64>(), sx in any::<u64>(), ga in any::<bool>()) {
        let q = s3(ga);
        let (ra, rb) = (random_matrix(&mut seeded(sa), 6), random_matrix(&mut seeded(sb), 6));
        let x = random_combination(&mut seeded(sx), q.algebra_basis());
        let w = q.w();
        let gamma = w.adjoint() * kron(&DMatrix::identity(6, 6), &x) * w;
        let want = (kron(&ra, &rb) * gamma).trace();
        let got = convolve(&q, &Functional::from_rho(&ra), &Functional::from_rho(&rb))
            .unwrap()
            .evaluate(&x)
            .unwrap();
        prop_assert!((got - want).norm() <= 1e-10 * (1.0 + want.norm()));
    }

    #[test]
    fn vector_states_have_unit_norm(s in any::<u64>(), ga in any::<bool>()) {
        let q = s3(ga);
        let d = block_decompose(q.algebra_basis()).unwrap();
        let z = random_unit_vector(&mut seeded(s), 6);
        let w = qglab_core::funalg::vector_state(&z).unwrap();
        prop_assert!((norm(&w, &d) - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn sa_residual_is_two_lipschitz(s1 in any::<u64>(), s2 in any::<u64>(), sz in any::<u64>()) {
        let ctx = DiagonalContext::new(&s3(false)).unwrap();
        let x1 = random_unit_vector(&mut seeded(s1), 6);
        let x2 = random_unit_vector(&mut seeded(s2), 6);
        let z = random_unit_vector(&mut seeded(sz), 6);
        let r1 = sa_residual(&ctx, &NetVector::new(x1.clone(), "a").unwrap(), &z).unwrap();
        let r2 = sa_residual(&ctx, &NetVector::new(x2.clone(), "b").unwrap(), &z).unwrap();
        prop_assert!((r1 - r2).abs() <= 2.0 * x1.distance(&x2).unwrap() + 1e-12);
    }

    #[test]
    fn apply_leg_matches_kron_embedding(s in any::<u64>(), leg in 0usize..3) {
        let mut rng = seeded(s);
        let op = random_matrix(&mut rng, 3);
        let v = TensorVector::new(vec![3, 3, 3], random_vector(&mut rng, 27)).unwrap();
        let id = ComplexMatrix::identity(3, 3);
        let factors: Vec<&ComplexMatrix> = (0..3).map(|k| if k == leg { &op } else { &id }).collect();
        let dense = kron(&kron(factors[0], factors[1]), factors[2]);
        let got = apply_leg(&op, &[leg], &v).unwrap();
        let want = &dense * v.data();
        prop_assert!((got.data() - want).norm() <= 1e-12);
    }
}
