mod common;

use common::*;
use mwca_core::datasets::{health_survey, HEALTH_AGE_GROUPS};
use mwca_core::decompose::{hosvd, sign_fix, RankSpec};
use mwca_core::metric::{
    ca_metric, isometry_apply, isometry_inverse, marginals, relative_frequencies, weighted_norm,
    ModeMetric,
};
use mwca_core::mwca::{
    analyze, ca_mwca_images, mwca_of_frequencies, relative_error_ca_mwca, run_ca, run_mwca,
    Algorithm, MwcaResult,
};
use mwca_core::tensor::{unfold, DenseMatrix, DenseTensor};
use mwca_core::verify::{
    barycentric_weight_sums, kron_chain_apply, residual, verify_all, verify_barycentric,
    verify_component_link_euclidean, verify_component_link_metric, Check, Target,
};
use mwca_core::ContingencyTable;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn random_metric(r: &mut ChaCha8Rng, shape: &[usize]) -> ModeMetric {
    ModeMetric::new(
        shape
            .iter()
            .map(|&n| (0..n).map(|_| r.gen_range(0.2..3.0)).collect())
            .collect(),
    )
    .unwrap()
}

fn diag(v: &[f64]) -> DenseMatrix {
    DenseMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(v))
}

#[test]
fn kron_chain_apply_matches_explicit_product() {
    let mut r = rng(40);
    for shape in [vec![3, 2, 4], vec![2, 3, 2, 2]] {
        let t = random_tensor(&mut r, &shape);
        let factors: Vec<DenseMatrix> = shape.iter().map(|&n| random_matrix(&mut r, n, 2)).collect();
        for mode in 1..=shape.len() {
            let fast = kron_chain_apply(&t, &factors, mode).unwrap();
            let slow = unfold(&t, mode).unwrap() * explicit_reversed_chain(&factors, mode);
            assert!(max_abs(&(fast - slow)) < 1e-12);
        }
    }
}

/// Euclidean link with the explicit Kronecker chain.
fn euclidean_oracle(res: &MwcaResult, mode: usize) -> DenseMatrix {
    unfold(&res.transformed, mode).unwrap()
        * explicit_reversed_chain(&res.y, mode)
        * unfold(&res.b, mode).unwrap().transpose()
}

fn metric_oracle(res: &MwcaResult, mode: usize) -> DenseMatrix {
    let weighted: Vec<DenseMatrix> = (1..=res.order())
        .map(|eta| diag(&res.metric.squared(eta)) * &res.w[eta - 1])
        .collect();
    unfold(&res.frequencies, mode).unwrap()
        * explicit_reversed_chain(&weighted, mode)
        * unfold(&res.b, mode).unwrap().transpose()
}

#[test]
fn component_links_against_explicit_kronecker() {
    let mut r = rng(41);
    for shape in [vec![3, 4, 2], vec![2, 2, 3, 2], vec![4, 3, 3]] {
        let f = random_tensor(&mut r, &shape);
        let metric = random_metric(&mut r, &shape);
        let res = analyze(&f, &metric, &RankSpec::Full, Algorithm::Hosvd).unwrap();
        for mode in 1..=shape.len() {
            let (_, rel) = residual(&res.y[mode - 1], &euclidean_oracle(&res, mode));
            assert!(rel <= 1e-10, "euclidean mode {mode}: {rel}");
            let (_, rel) = residual(&res.w[mode - 1], &metric_oracle(&res, mode));
            assert!(rel <= 1e-9, "metric mode {mode}: {rel}");
            let rep = verify_component_link_euclidean(&res.transformed, &res.decomposition, mode).unwrap();
            assert!(rep.passed && rep.relative_residual <= 1e-10);
            let rep = verify_component_link_metric(&res.frequencies, &res, mode).unwrap();
            assert!(rep.passed);
        }
    }
}

/// Quadruple sum over `i_η` and `ℓ_η` for the scaled barycentric relation of
/// an order-3 tensor.
fn barycentric_oracle(res: &MwcaResult, mode: usize) -> DenseMatrix {
    let f = &res.frequencies;
    let shape = f.shape().to_vec();
    let ranks = res.decomposition.ranks.clone();
    let fm = res.marginals.as_ref().unwrap().mode(mode).to_vec();
    let sigma = res.sigma(mode).to_vec();
    let others: Vec<usize> = (1..=3).filter(|&m| m != mode).collect();
    let (a, b) = (others[0], others[1]);
    let mut out = DenseMatrix::zeros(shape[mode - 1], ranks[mode - 1]);
    for i in 1..=shape[mode - 1] {
        for l in 1..=ranks[mode - 1] {
            let mut acc = 0.0;
            for ia in 1..=shape[a - 1] {
                for ib in 1..=shape[b - 1] {
                    let mut ix = [0usize; 3];
                    ix[mode - 1] = i;
                    ix[a - 1] = ia;
                    ix[b - 1] = ib;
                    let fv = f.get(&ix).unwrap();
                    let mut inner = 0.0;
                    for la in 1..=ranks[a - 1] {
                        for lb in 1..=ranks[b - 1] {
                            let mut lx = [0usize; 3];
                            lx[mode - 1] = l;
                            lx[a - 1] = la;
                            lx[b - 1] = lb;
                            inner += res.z[a - 1][(ia - 1, la - 1)]
                                * res.z[b - 1][(ib - 1, lb - 1)]
                                * sigma[l - 1]
                                * res.b.get(&lx).unwrap();
                        }
                    }
                    acc += fv / fm[i - 1] * inner;
                }
            }
            out[(i - 1, l - 1)] = acc / sigma[l - 1];
        }
    }
    out
}

#[test]
fn barycentric_relation_brute_force_2x3x4() {
    let mut r = rng(42);
    for _ in 0..5 {
        let t = random_positive(&mut r, &[2, 3, 4]);
        let f = t.scale(1.0 / t.sum());
        let res = mwca_of_frequencies(&f, &RankSpec::Full, Algorithm::Hosvd).unwrap();
        for mode in 1..=3 {
            let oracle = barycentric_oracle(&res, mode);
            let (_, rel) = residual(&res.z[mode - 1], &oracle);
            assert!(rel <= 1e-9, "mode {mode}: {rel}");
            let rep = verify_barycentric(&res, mode).unwrap();
            assert!(rep.passed, "{rep:?}");
            assert!(rep.weight_sum_defect.unwrap() <= 1e-12);
            for s in barycentric_weight_sums(&f, res.marginals.as_ref().unwrap(), mode).unwrap() {
                assert!((s - 1.0).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn truncated_links_hold_on_reconstruction_only() {
    let mut r = rng(43);
    let t = random_positive(&mut r, &[4, 5, 3]);
    let f = t.scale(1.0 / t.sum());
    let res = mwca_of_frequencies(&f, &RankSpec::Explicit(vec![2, 3, 2]), Algorithm::Hosvd).unwrap();
    assert!(res.decomposition.is_truncated());
    let on_recon = verify_all(&res, Target::Reconstruction, 1e-10).unwrap();
    assert!(on_recon.iter().all(|rep| rep.passed && rep.target == Target::Reconstruction));
    assert!(on_recon.iter().all(|rep| rep.check != Check::Barycentric));
    let on_original = verify_all(&res, Target::Original, 1e-10).unwrap();
    assert!(on_original.iter().any(|rep| !rep.passed));
    assert!(verify_barycentric(&res, 1).is_err());
}

#[test]
fn st_hosvd_and_hooi_reconstruction_links() {
    let mut r = rng(44);
    let t = random_positive(&mut r, &[4, 4, 3]);
    let f = t.scale(1.0 / t.sum());
    for alg in [Algorithm::StHosvd, Algorithm::DEFAULT_HOOI] {
        let res = mwca_of_frequencies(&f, &RankSpec::Explicit(vec![2, 2, 2]), alg).unwrap();
        let reps = verify_all(&res, Target::Reconstruction, 1e-9).unwrap();
        assert!(reps.iter().all(|rep| rep.passed), "{} {reps:?}", alg.name());
    }
}

#[test]
fn isometry_preserves_norms() {
    let mut r = rng(45);
    for case in 0..50 {
        let shape: Vec<usize> = (0..2 + case % 3).map(|_| r.gen_range(1..5)).collect();
        let f = random_tensor(&mut r, &shape);
        let metric = random_metric(&mut r, &shape);
        let x = isometry_apply(&f, &metric).unwrap();
        let wn = weighted_norm(&f, &metric).unwrap();
        assert!((wn - x.frobenius_norm()).abs() <= 1e-12 * wn.max(1.0));
        let back = isometry_inverse(&x, &metric).unwrap();
        assert!(back.max_abs_diff(&f).unwrap() <= 1e-12);
    }
}

#[test]
fn frequencies_are_invariant_to_count_scaling() {
    let table = health_survey().unwrap();
    let scaled = ContingencyTable::new(
        table.counts().scale(7.0),
        table.mode_names().to_vec(),
        table.labels().to_vec(),
    )
    .unwrap();
    let a = run_mwca(&table, &RankSpec::Full, Algorithm::Hosvd).unwrap();
    let b = run_mwca(&scaled, &RankSpec::Full, Algorithm::Hosvd).unwrap();
    assert!(a.frequencies.max_abs_diff(&b.frequencies).unwrap() <= 1e-15);
    for mode in 1..=3 {
        for (x, y) in a.sigma(mode).iter().zip(b.sigma(mode)) {
            assert!((x - y).abs() <= 1e-12);
        }
    }
}

#[test]
fn inertia_sums_to_squared_norm() {
    let res = run_mwca(&health_survey().unwrap(), &RankSpec::Full, Algorithm::Hosvd).unwrap();
    let total = res.transformed.frobenius_norm().powi(2);
    for inertia in &res.inertia {
        assert!((inertia.iter().sum::<f64>() - total).abs() <= 1e-12 * total);
    }
}

// Hand-summed marginals of the health survey.
const MALE_TOTAL: f64 = 3089.0;
const AGE_TOTALS: [f64; 7] = [1223.0, 1234.0, 1035.0, 861.0, 909.0, 713.0, 396.0];
const GRADE_TOTALS: [f64; 5] = [817.0, 3542.0, 1495.0, 414.0, 103.0];

#[test]
fn health_survey_totals_and_marginals() {
    let table = health_survey().unwrap();
    assert_eq!(table.grand_total(), 6371.0);
    let m = marginals(table.counts()).unwrap();
    assert_eq!(m.mode(1), &[MALE_TOTAL, 6371.0 - MALE_TOTAL]);
    assert_eq!(m.mode(2), &AGE_TOTALS);
    assert_eq!(m.mode(3), &GRADE_TOTALS);
}

#[test]
fn health_survey_relative_error_at_health_mode() {
    let f = relative_frequencies(&health_survey().unwrap()).unwrap();
    let (ft, at) = ca_mwca_images(&f, 3).unwrap();
    let e = relative_error_ca_mwca(&ft, &at).unwrap();
    assert!((e - 0.035).abs() <= 0.005, "{e}");
}

#[test]
fn health_survey_identities() {
    let res = run_mwca(&health_survey().unwrap(), &RankSpec::Full, Algorithm::Hosvd).unwrap();
    let reports = verify_all(&res, Target::Original, 1e-9).unwrap();
    assert_eq!(reports.len(), 9);
    for rep in &reports {
        assert!(rep.passed, "{rep:?}");
    }
    // leading singular values close to one, smaller for the gender mode
    assert!((res.sigma(1)[0] - 1.068).abs() < 1e-3);
    assert!((res.sigma(3)[0] - 1.0023).abs() < 1e-3);
}

#[test]
fn health_survey_age_order_on_second_component() {
    let res = run_mwca(&health_survey().unwrap(), &RankSpec::Full, Algorithm::Hosvd).unwrap();
    let z = &res.z[1];
    assert_eq!(z.nrows(), HEALTH_AGE_GROUPS.len());
    let col: Vec<f64> = z.column(1).iter().copied().collect();
    assert!(col.windows(2).all(|w| w[0] < w[1]), "{col:?}");
}

#[test]
fn two_way_mwca_agrees_with_ca() {
    let mut r = rng(46);
    for _ in 0..20 {
        let (n, p) = (r.gen_range(2..6), r.gen_range(2..6));
        let counts = DenseMatrix::from_fn(n, p, |_, _| f64::from(r.gen_range(1u32..40)));
        let t = DenseTensor::new(vec![n, p], counts.as_slice().to_vec()).unwrap();
        let res = run_mwca(&ContingencyTable::unlabeled(t).unwrap(), &RankSpec::Full, Algorithm::Hosvd).unwrap();
        let ca = run_ca(&counts, None).unwrap();
        assert_eq!(res.sigma(1).len(), ca.sigma.len());
        for (a, b) in res.sigma(1).iter().zip(&ca.sigma) {
            assert!((a - b).abs() <= 1e-10);
        }
        // signs are fixed on Y; W and Z columns follow Y's flips
        let sides = [
            ([&res.y[0], &res.w[0], &res.z[0]], [&ca.row_y, &ca.row_w, &ca.row_z]),
            ([&res.y[1], &res.w[1], &res.z[1]], [&ca.col_y, &ca.col_w, &ca.col_z]),
        ];
        for (mine, theirs) in sides {
            for k in 0..3 {
                let fixed_a = sign_fix(mine[0], mine[k]).unwrap().1;
                let fixed_b = sign_fix(theirs[0], theirs[k]).unwrap().1;
                assert!(max_abs(&(fixed_a - fixed_b)) <= 1e-10);
            }
        }
    }
}

#[test]
fn ca_metric_is_the_chi_square_metric() {
    let t = random_positive(&mut rng(47), &[3, 2, 2]);
    let f = t.scale(1.0 / t.sum());
    let m = marginals(&f).unwrap();
    let metric = ca_metric(&m).unwrap();
    let x = isometry_apply(&f, &metric).unwrap();
    let want = DenseTensor::from_fn(f.shape().to_vec(), |ix| {
        let denom: f64 = ix.iter().enumerate().map(|(p, &i)| m.mode(p + 1)[i - 1]).product();
        f.get(ix).unwrap() / denom.sqrt()
    })
    .unwrap();
    assert!(x.max_abs_diff(&want).unwrap() <= 1e-13);
    let _ = hosvd(&x, &RankSpec::Full).unwrap();
}
