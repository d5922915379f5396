mod common;

use common::*;
use mwca_core::tensor::{fold, kronecker, ttm, unfold, DenseMatrix, DenseTensor};
use proptest::prelude::*;

fn shape_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..5, 1..=5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fold_inverts_unfold(shape in shape_strategy(), seed in any::<u64>()) {
        let t = random_tensor(&mut rng(seed), &shape);
        for mode in 1..=shape.len() {
            let m = unfold(&t, mode).unwrap();
            prop_assert_eq!(m.nrows(), shape[mode - 1]);
            prop_assert_eq!(fold(&m, mode, &shape).unwrap(), t.clone());
            prop_assert!((m.norm() - t.frobenius_norm()).abs() <= 1e-12 * t.frobenius_norm().max(1.0));
        }
    }

    #[test]
    fn ttm_unfolding_identity(shape in prop::collection::vec(1usize..5, 2..=4), seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = random_tensor(&mut r, &shape);
        let mats: Vec<DenseMatrix> = shape.iter().map(|&n| random_matrix(&mut r, 1 + (n + 1) % 4, n)).collect();
        let ops: Vec<Option<&DenseMatrix>> = mats.iter().map(Some).collect();
        let out = ttm(&t, &ops).unwrap();
        for mode in 1..=shape.len() {
            let lhs = unfold(&out, mode).unwrap();
            let chain = explicit_reversed_chain(&mats, mode);
            let rhs = &mats[mode - 1] * unfold(&t, mode).unwrap() * chain.transpose();
            prop_assert!(rel_diff(&rhs, &lhs) <= 1e-12, "mode {} diff {}", mode, rel_diff(&rhs, &lhs));
        }
    }
}

#[test]
fn ttm_identity_on_3x4x5() {
    let mut r = rng(11);
    let t = random_tensor(&mut r, &[3, 4, 5]);
    let mats = [random_matrix(&mut r, 2, 3), random_matrix(&mut r, 6, 4), random_matrix(&mut r, 3, 5)];
    let out = ttm(&t, &[Some(&mats[0]), Some(&mats[1]), Some(&mats[2])]).unwrap();
    let lhs = unfold(&out, 2).unwrap();
    let rhs = &mats[1] * unfold(&t, 2).unwrap() * kronecker(&mats[2], &mats[0]).transpose();
    assert!(rel_diff(&rhs, &lhs) <= 1e-12);
}

#[test]
fn ttm_is_multilinear() {
    let mut r = rng(5);
    for _ in 0..20 {
        let t = random_tensor(&mut r, &[3, 2, 4]);
        let m = random_matrix(&mut r, 2, 3);
        let n = random_matrix(&mut r, 2, 3);
        let (alpha, beta) = (0.7, -1.3);
        let combo = &m * alpha + &n * beta;
        let lhs = ttm(&t, &[Some(&combo), None, None]).unwrap();
        let a = ttm(&t, &[Some(&m), None, None]).unwrap().scale(alpha);
        let b = ttm(&t, &[Some(&n), None, None]).unwrap().scale(beta);
        let rhs = a.add(&b).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12);
    }
}

#[test]
fn kronecker_vec_identity() {
    // (a ⊗ b) vec(X) = vec(b X aᵀ), vec stacking columns
    let mut r = rng(3);
    for _ in 0..10 {
        let a = random_matrix(&mut r, 2, 2);
        let b = random_matrix(&mut r, 2, 2);
        let x = random_matrix(&mut r, 2, 2);
        let vec_x = DenseMatrix::from_column_slice(4, 1, x.as_slice());
        let lhs = kronecker(&a, &b) * vec_x;
        let bxa = &b * &x * a.transpose();
        let mut brute = [0.0; 4];
        for (k, slot) in brute.iter_mut().enumerate() {
            *slot = bxa[(k % 2, k / 2)];
        }
        for k in 0..4 {
            assert!((lhs[(k, 0)] - brute[k]).abs() < 1e-14);
        }
    }
}

#[test]
fn kronecker_column_order_matches_combined_index() {
    // column ℓ of Y3 ⊗ Y2 is y3_k ⊗ y2_j with ℓ = j + r2 (k − 1) (1-based)
    let mut r = rng(8);
    let y2 = random_matrix(&mut r, 3, 2);
    let y3 = random_matrix(&mut r, 2, 3);
    let k32 = kronecker(&y3, &y2);
    for k in 0..3 {
        for j in 0..2 {
            let col = k32.column(j + 2 * k);
            let want = kronecker(&y3.columns(k, 1).into_owned(), &y2.columns(j, 1).into_owned());
            assert!((col - want.column(0)).norm() < 1e-15);
        }
    }
}

#[test]
fn outer_matches_elementary_definition() {
    let t = DenseTensor::outer(&[&[1.0, 2.0], &[3.0, 4.0, 5.0]]).unwrap();
    assert_eq!(t.get(&[2, 3]), Some(10.0));
    assert_eq!(t.get(&[1, 2]), Some(4.0));
}
