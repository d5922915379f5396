//! Matrix SVD and Tucker bases: HOSVD, sequentially truncated HOSVD and HOOI.
//!
//! Every factor leaving this module has been passed through [`sign_fix`], so
//! repeated runs on the same input give bit-identical results.

use crate::error::{Error, Result};
use crate::tensor::{ttm, ttm_mode, unfold, DenseMatrix, DenseTensor};

/// Singular values at or below `RANK_TOL · σ_1` count as zero.
pub const RANK_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct SvdResult {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

impl SvdResult {
    /// Number of singular values above the rank tolerance.
    pub fn numerical_rank(&self) -> usize {
        numerical_rank(&self.sigma)
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        let mut us = self.u.clone();
        for (j, s) in self.sigma.iter().enumerate() {
            us.column_mut(j).scale_mut(*s);
        }
        us * self.v.transpose()
    }
}

pub fn numerical_rank(sigma: &[f64]) -> usize {
    match sigma.first() {
        Some(&s1) if s1 > 0.0 => sigma.iter().filter(|&&s| s > RANK_TOL * s1).count(),
        _ => 0,
    }
}

/// Thin SVD with singular values sorted nonincreasing, truncated to `rank`
/// when given, and sign-fixed.
pub fn svd(m: &DenseMatrix, rank: Option<usize>) -> Result<SvdResult> {
    let k = m.nrows().min(m.ncols());
    let r = rank.unwrap_or(k);
    if r > k {
        return Err(Error::RankTooLarge {
            mode: 1,
            requested: r,
            available: k,
        });
    }
    let (u, values, v) = jacobi_svd(m);
    let mut order: Vec<usize> = (0..values.len()).collect();
    // stable sort keeps column order among exact ties
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    order.truncate(r);

    let mut us = DenseMatrix::zeros(m.nrows(), r);
    let mut vs = DenseMatrix::zeros(m.ncols(), r);
    let mut sigma = Vec::with_capacity(r);
    for (j, &src) in order.iter().enumerate() {
        us.set_column(j, &u.column(src));
        vs.set_column(j, &v.column(src));
        sigma.push(values[src]);
    }
    let (u, v) = sign_fix(&us, &vs)?;
    Ok(SvdResult { u, sigma, v })
}

/// Singular values only, sorted nonincreasing.
pub fn singular_values(m: &DenseMatrix) -> Vec<f64> {
    let mut s = jacobi_svd(m).1;
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

const JACOBI_MAX_SWEEPS: usize = 80;

/// One-sided Jacobi SVD, unsorted. Returns `(U, σ, V)` with `min(m, n)`
/// columns each.
fn jacobi_svd(m: &DenseMatrix) -> (DenseMatrix, Vec<f64>, DenseMatrix) {
    if m.nrows() < m.ncols() {
        let (u, s, v) = jacobi_svd(&m.transpose());
        return (v, s, u);
    }
    let n = m.ncols();
    let mut b = m.clone();
    let mut v = DenseMatrix::identity(n, n);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = b.column(p).norm_squared();
                let beta = b.column(q).norm_squared();
                let gamma = b.column(p).dot(&b.column(q));
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut b, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma: Vec<f64> = (0..n).map(|j| b.column(j).norm()).collect();
    let mut u = b;
    let mut missing = Vec::new();
    for (j, &s) in sigma.iter().enumerate() {
        if s > 0.0 {
            u.column_mut(j).unscale_mut(s);
        } else {
            missing.push(j);
        }
    }
    complete_columns(&mut u, &missing);
    (u, sigma, v)
}

fn rotate(m: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64) {
    for i in 0..m.nrows() {
        let (a, b) = (m[(i, p)], m[(i, q)]);
        m[(i, p)] = c * a - s * b;
        m[(i, q)] = s * a + c * b;
    }
}

/// Fills the listed (zero) columns with unit vectors orthogonal to the rest.
fn complete_columns(u: &mut DenseMatrix, missing: &[usize]) {
    let rows = u.nrows();
    let mut filled: Vec<usize> = (0..u.ncols()).filter(|j| !missing.contains(j)).collect();
    for &j in missing {
        let mut best: Option<nalgebra::DVector<f64>> = None;
        for k in 0..rows {
            let mut x = nalgebra::DVector::zeros(rows);
            x[k] = 1.0;
            // two passes of Gram-Schmidt
            for _ in 0..2 {
                for &f in &filled {
                    let proj = u.column(f).dot(&x);
                    x -= u.column(f) * proj;
                }
            }
            if best.as_ref().is_none_or(|b| x.norm() > b.norm()) {
                best = Some(x);
            }
        }
        if let Some(x) = best {
            let norm = x.norm();
            u.set_column(j, &(x / norm));
        }
        filled.push(j);
    }
}

/// Orientation statistic of a column: `Σ_j sgn(u_j) u_j²`.
pub fn orientation(column: impl IntoIterator<Item = f64>) -> f64 {
    column.into_iter().map(|x| x.signum() * x * x).sum()
}

/// Orients each column of `u` so that the majority of its mass points in the
/// positive direction, negating the matching column of `companion` alongside.
/// Zero statistics keep their sign.
pub fn sign_fix(u: &DenseMatrix, companion: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    if u.ncols() != companion.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "sign_fix: {} columns vs {} columns",
            u.ncols(),
            companion.ncols()
        )));
    }
    let mut u = u.clone();
    let mut c = companion.clone();
    for j in 0..u.ncols() {
        if orientation(u.column(j).iter().copied()) < 0.0 {
            u.column_mut(j).neg_mut();
            c.column_mut(j).neg_mut();
        }
    }
    Ok((u, c))
}

/// Largest entry of `|uᵀu − I|`.
pub fn orthonormality_defect(u: &DenseMatrix) -> f64 {
    let g = u.transpose() * u;
    let mut worst = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}

/// Requested multilinear rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RankSpec {
    /// The numerical rank of every unfolding.
    Full,
    Explicit(Vec<usize>),
}

impl RankSpec {
    /// Resolves against the available per-mode ranks, rejecting anything above them.
    pub fn resolve(&self, available: &[usize]) -> Result<Vec<usize>> {
        match self {
            RankSpec::Full => Ok(available.to_vec()),
            RankSpec::Explicit(r) => {
                if r.len() != available.len() {
                    return Err(Error::ShapeMismatch(format!(
                        "{} ranks given for a tensor of order {}",
                        r.len(),
                        available.len()
                    )));
                }
                for (pos, (&req, &avail)) in r.iter().zip(available).enumerate() {
                    if req == 0 {
                        return Err(Error::ZeroRank { mode: pos + 1 });
                    }
                    if req > avail {
                        return Err(Error::RankTooLarge {
                            mode: pos + 1,
                            requested: req,
                            available: avail,
                        });
                    }
                }
                Ok(r.clone())
            }
        }
    }
}

/// Numerical rank of every unfolding of `t`.
pub fn mode_ranks(t: &DenseTensor) -> Result<Vec<usize>> {
    (1..=t.order())
        .map(|mode| Ok(numerical_rank(&singular_values(&unfold(t, mode)?))))
        .collect()
}

#[derive(Clone, Debug)]
pub struct TuckerDecomposition {
    /// `U_µ`, `n_µ × r_µ` with orthonormal columns.
    pub factors: Vec<DenseMatrix>,
    pub core: DenseTensor,
    /// `Σ_µ` as nonincreasing lists of length `r_µ`.
    pub mode_sigma: Vec<Vec<f64>>,
    pub ranks: Vec<usize>,
    /// Numerical ranks of the decomposed tensor's unfoldings.
    pub input_mode_ranks: Vec<usize>,
}

impl TuckerDecomposition {
    pub fn order(&self) -> usize {
        self.factors.len()
    }

    /// True when some `r_µ` is below the input's mode rank.
    pub fn is_truncated(&self) -> bool {
        self.ranks
            .iter()
            .zip(&self.input_mode_ranks)
            .any(|(r, n)| r < n)
    }

    /// `(U_1, …, U_d) C`.
    pub fn reconstruct(&self) -> Result<DenseTensor> {
        let ops: Vec<Option<&DenseMatrix>> = self.factors.iter().map(Some).collect();
        ttm(&self.core, &ops)
    }

    /// Rotates each factor onto the left singular vectors of the
    /// reconstruction's unfoldings, turning this into the exact HOSVD of its own
    /// reconstruction. `mode_sigma` becomes the reconstruction's singular values.
    pub fn canonicalized(&self) -> Result<Self> {
        let d = self.order();
        let mut factors = Vec::with_capacity(d);
        let mut rotations = Vec::with_capacity(d);
        let mut mode_sigma = Vec::with_capacity(d);
        for mode in 1..=d {
            let r = self.ranks[mode - 1];
            let cm = unfold(&self.core, mode)?;
            let s = svd(&cm, None)?;
            if s.sigma.len() < r || numerical_rank(&s.sigma) < r {
                let index = numerical_rank(&s.sigma) + 1;
                return Err(Error::SingularSigma { mode, index });
            }
            let rotated = &self.factors[mode - 1] * &s.u;
            let (u, p) = sign_fix(&rotated, &s.u)?;
            factors.push(u);
            rotations.push(p.transpose());
            mode_sigma.push(s.sigma[..r].to_vec());
        }
        let ops: Vec<Option<&DenseMatrix>> = rotations.iter().map(Some).collect();
        let core = ttm(&self.core, &ops)?;
        Ok(Self {
            factors,
            core,
            mode_sigma,
            ranks: self.ranks.clone(),
            input_mode_ranks: self.input_mode_ranks.clone(),
        })
    }
}

fn transposes(factors: &[DenseMatrix]) -> Vec<DenseMatrix> {
    factors.iter().map(|u| u.transpose()).collect()
}

fn core_from(t: &DenseTensor, factors: &[DenseMatrix]) -> Result<DenseTensor> {
    let ts = transposes(factors);
    let ops: Vec<Option<&DenseMatrix>> = ts.iter().map(Some).collect();
    ttm(t, &ops)
}

/// Higher-order SVD: `U_µ` are the leading left singular vectors of each
/// unfolding, `C = (U_1ᵀ, …, U_dᵀ) t`.
pub fn hosvd(t: &DenseTensor, ranks: &RankSpec) -> Result<TuckerDecomposition> {
    let d = t.order();
    let mut full = Vec::with_capacity(d);
    for mode in 1..=d {
        full.push(svd(&unfold(t, mode)?, None)?);
    }
    let available: Vec<usize> = full.iter().map(|s| s.numerical_rank()).collect();
    let r = ranks.resolve(&available)?;
    let mut factors = Vec::with_capacity(d);
    let mut mode_sigma = Vec::with_capacity(d);
    for (s, &rm) in full.iter().zip(&r) {
        factors.push(s.u.columns(0, rm).into_owned());
        mode_sigma.push(s.sigma[..rm].to_vec());
    }
    let core = core_from(t, &factors)?;
    Ok(TuckerDecomposition {
        factors,
        core,
        mode_sigma,
        ranks: r,
        input_mode_ranks: available,
    })
}

/// Sequentially truncated HOSVD: modes are processed in order and the working
/// tensor shrinks after each one.
pub fn st_hosvd(t: &DenseTensor, ranks: &RankSpec) -> Result<TuckerDecomposition> {
    let available = mode_ranks(t)?;
    let r = ranks.resolve(&available)?;
    let mut work = t.clone();
    let mut factors = Vec::with_capacity(t.order());
    for (pos, &rm) in r.iter().enumerate() {
        let mode = pos + 1;
        let s = svd(&unfold(&work, mode)?, None)?;
        let have = s.numerical_rank();
        if have < rm {
            return Err(Error::RankTooLarge {
                mode,
                requested: rm,
                available: have,
            });
        }
        let u = s.u.columns(0, rm).into_owned();
        work = ttm_mode(&work, &u.transpose(), mode)?;
        factors.push(u);
    }
    let dec = TuckerDecomposition {
        factors,
        core: work,
        mode_sigma: Vec::new(),
        ranks: r,
        input_mode_ranks: available,
    };
    dec.canonicalized()
}

/// Higher-order orthogonal iteration initialised from the truncated HOSVD.
pub fn hooi(
    t: &DenseTensor,
    ranks: &RankSpec,
    max_iters: usize,
    tol: f64,
) -> Result<TuckerDecomposition> {
    hooi_traced(t, ranks, max_iters, tol).map(|(dec, _)| dec)
}

/// [`hooi`] plus the fit `‖C‖_F` after initialisation and after every sweep.
pub fn hooi_traced(
    t: &DenseTensor,
    ranks: &RankSpec,
    max_iters: usize,
    tol: f64,
) -> Result<(TuckerDecomposition, Vec<f64>)> {
    let init = hosvd(t, ranks)?;
    let d = t.order();
    let norm = t.frobenius_norm();
    let mut factors = init.factors;
    let mut core = init.core;
    let mut fits = vec![core.frobenius_norm()];

    for _ in 0..max_iters {
        for mode in 1..=d {
            let ts = transposes(&factors);
            let ops: Vec<Option<&DenseMatrix>> = ts
                .iter()
                .enumerate()
                .map(|(pos, m)| if pos + 1 == mode { None } else { Some(m) })
                .collect();
            let partial = ttm(t, &ops)?;
            let s = svd(&unfold(&partial, mode)?, Some(init.ranks[mode - 1]))?;
            factors[mode - 1] = s.u;
        }
        core = core_from(t, &factors)?;
        let fit = core.frobenius_norm();
        let prev = *fits.last().unwrap_or(&0.0);
        fits.push(fit);
        let change = if norm > 0.0 { (fit - prev).abs() / norm } else { 0.0 };
        if change < tol {
            break;
        }
    }
    let dec = TuckerDecomposition {
        factors,
        core,
        mode_sigma: Vec::new(),
        ranks: init.ranks,
        input_mode_ranks: init.input_mode_ranks,
    };
    Ok((dec.canonicalized()?, fits))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag3() -> DenseMatrix {
        DenseMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&[3.0, 2.0, 1.0]))
    }

    #[test]
    fn svd_of_diagonal() {
        let s = svd(&diag3(), None).unwrap();
        assert_eq!(s.sigma.len(), 3);
        for (a, b) in s.sigma.iter().zip([3.0, 2.0, 1.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        for j in 0..3 {
            // signed permutation, and sign-fixed to +1
            assert!((s.u[(j, j)] - 1.0).abs() < 1e-14);
            assert!((s.v[(j, j)] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn svd_of_rank_one() {
        let x = nalgebra::DVector::from_column_slice(&[1.0, 2.0, 2.0]);
        let y = nalgebra::DVector::from_column_slice(&[3.0, 4.0]);
        let m = &x * y.transpose();
        let s = svd(&m, None).unwrap();
        assert!((s.sigma[0] - 15.0).abs() < 1e-13);
        assert!(s.sigma[1].abs() < 1e-13);
        assert_eq!(s.numerical_rank(), 1);
    }

    #[test]
    fn svd_rank_errors() {
        assert!(matches!(
            svd(&diag3(), Some(4)),
            Err(Error::RankTooLarge { requested: 4, .. })
        ));
    }

    #[test]
    fn sign_fix_cases() {
        let pos = DenseMatrix::from_column_slice(3, 1, &[0.6, -0.1, 0.5]);
        let comp = DenseMatrix::from_column_slice(2, 1, &[1.0, 2.0]);
        let (u, c) = sign_fix(&pos, &comp).unwrap();
        assert_eq!(u, pos);
        assert_eq!(c, comp);

        let neg = -pos.clone();
        let (u, c) = sign_fix(&neg, &comp).unwrap();
        assert_eq!(u, pos);
        assert_eq!(c, -comp.clone());

        let (u2, c2) = sign_fix(&u, &c).unwrap();
        assert_eq!((u2, c2), (u, c));

        assert!(sign_fix(&pos, &DenseMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn sign_fix_tie_keeps_sign() {
        let tie = DenseMatrix::from_column_slice(2, 1, &[0.5, -0.5]);
        let (u, _) = sign_fix(&tie, &DenseMatrix::zeros(1, 1)).unwrap();
        assert_eq!(u, tie);
    }

    #[test]
    fn hosvd_elementary_tensor() {
        let a = [1.0, 2.0];
        let b = [-1.0, 0.5, 2.0];
        let c = [3.0, 1.0];
        let t = DenseTensor::outer(&[&a, &b, &c]).unwrap();
        let dec = hosvd(&t, &RankSpec::Full).unwrap();
        assert_eq!(dec.ranks, vec![1, 1, 1]);
        let na = (5.0f64).sqrt();
        let nb = (5.25f64).sqrt();
        let nc = (10.0f64).sqrt();
        assert!((dec.core.data()[0].abs() - na * nb * nc).abs() < 1e-12);
        for (u, v) in dec.factors.iter().zip([&a[..], &b[..], &c[..]]) {
            let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let dot: f64 = u.column(0).iter().zip(v).map(|(p, q)| p * q).sum();
            assert!((dot.abs() - n).abs() < 1e-12);
        }
        let rec = dec.reconstruct().unwrap();
        assert!(rec.max_abs_diff(&t).unwrap() < 1e-12);
    }

    #[test]
    fn hosvd_diagonal_tensor() {
        let t = DenseTensor::from_fn(vec![3, 3, 3], |ix| {
            if ix[0] == ix[1] && ix[1] == ix[2] {
                [3.0, 2.0, 1.0][ix[0] - 1]
            } else {
                0.0
            }
        })
        .unwrap();
        let dec = hosvd(&t, &RankSpec::Explicit(vec![3, 3, 3])).unwrap();
        for s in &dec.mode_sigma {
            for (a, b) in s.iter().zip([3.0, 2.0, 1.0]) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hosvd_rank_error_names_mode() {
        let t = DenseTensor::outer(&[&[1.0, 2.0], &[1.0, 1.0, 1.0], &[2.0, 1.0]]).unwrap();
        let err = hosvd(&t, &RankSpec::Explicit(vec![1, 2, 1])).unwrap_err();
        assert_eq!(
            err,
            Error::RankTooLarge {
                mode: 2,
                requested: 2,
                available: 1
            }
        );
        assert!(matches!(
            hosvd(&t, &RankSpec::Explicit(vec![1, 0, 1])),
            Err(Error::ZeroRank { mode: 2 })
        ));
        assert!(hosvd(&t, &RankSpec::Explicit(vec![1, 1])).is_err());
    }

    #[test]
    fn rank_spec_resolution() {
        assert_eq!(RankSpec::Full.resolve(&[2, 3]).unwrap(), vec![2, 3]);
        assert_eq!(
            RankSpec::Explicit(vec![1, 3]).resolve(&[2, 3]).unwrap(),
            vec![1, 3]
        );
    }
}
