//! Correspondence analysis of matrices and multiway correspondence analysis of
//! tensors.
//!
//! Both follow the same pipeline: frequencies, marginals, the metric
//! `M_µ = diag(1/√f^µ)`, the isometry `X = ν(F)`, then an SVD (matrix case) or a
//! Tucker basis (tensor case) of `X`. Each mode gets three point clouds:
//!
//! * `Y_µ = U_µ Σ_µ` in the standard space,
//! * `W_µ = M_µ⁻¹ Y_µ` in the metric space,
//! * `Z_µ = M_µ² W_µ = M_µ Y_µ`, the scaled cloud used by the barycentric relation.
//!
//! The leading, almost constant component (singular value close to 1) is kept.

use crate::decompose::{hooi, hosvd, st_hosvd, svd, RankSpec, TuckerDecomposition, RANK_TOL};
use crate::error::{Error, Result};
use crate::metric::{
    ca_metric, isometry_apply, isometry_inverse, marginals, relative_frequencies, Marginals,
    ModeMetric,
};
use crate::table::ContingencyTable;
use crate::tensor::{ttm, ttm_mode, unfold, DenseMatrix, DenseTensor};
use nalgebra::DVector;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Algorithm {
    Hosvd,
    StHosvd,
    Hooi { max_iters: usize, tol: f64 },
}

impl Algorithm {
    pub const DEFAULT_HOOI: Algorithm = Algorithm::Hooi {
        max_iters: 100,
        tol: 1e-12,
    };

    pub fn decompose(&self, x: &DenseTensor, ranks: &RankSpec) -> Result<TuckerDecomposition> {
        match *self {
            Algorithm::Hosvd => hosvd(x, ranks),
            Algorithm::StHosvd => st_hosvd(x, ranks),
            Algorithm::Hooi { max_iters, tol } => hooi(x, ranks, max_iters, tol),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Hosvd => "hosvd",
            Algorithm::StHosvd => "st_hosvd",
            Algorithm::Hooi { .. } => "hooi",
        }
    }
}

#[derive(Clone, Debug)]
pub struct MwcaResult {
    /// The analysed tensor `F` (relative frequencies for MWCA).
    pub frequencies: DenseTensor,
    /// `X = ν(F)`.
    pub transformed: DenseTensor,
    pub decomposition: TuckerDecomposition,
    pub y: Vec<DenseMatrix>,
    pub w: Vec<DenseMatrix>,
    pub z: Vec<DenseMatrix>,
    /// `B = (Σ_1⁻¹, …, Σ_d⁻¹) C`.
    pub b: DenseTensor,
    pub metric: ModeMetric,
    /// Present when the metric is the CA metric built from these marginals.
    pub marginals: Option<Marginals>,
    /// Squared singular values per mode.
    pub inertia: Vec<Vec<f64>>,
    pub algorithm: Algorithm,
}

impl MwcaResult {
    pub fn order(&self) -> usize {
        self.y.len()
    }

    pub fn sigma(&self, mode: usize) -> &[f64] {
        &self.decomposition.mode_sigma[mode - 1]
    }

    /// `B_µ = (I, …, Σ_µ, …, I) B`, whose mode-µ unfolding is `Σ_µ B^(µ)`.
    pub fn b_scaled(&self, mode: usize) -> Result<DenseTensor> {
        let s = DenseMatrix::from_diagonal(&DVector::from_column_slice(self.sigma(mode)));
        ttm_mode(&self.b, &s, mode)
    }

    /// The same analysis rebuilt on the rank-r reconstruction: `F` is replaced
    /// by `ν⁻¹` of the reconstruction and the decomposition by the exact HOSVD
    /// of that reconstruction. The metric and marginals are unchanged.
    pub fn on_reconstruction(&self) -> Result<MwcaResult> {
        let dec = self.decomposition.canonicalized()?;
        let x = dec.reconstruct()?;
        let f = isometry_inverse(&x, &self.metric)?;
        assemble(
            f,
            x,
            dec,
            self.metric.clone(),
            self.marginals.clone(),
            self.algorithm,
        )
    }
}

/// Metric Tucker analysis of `f` under an arbitrary positive diagonal metric.
pub fn analyze(
    f: &DenseTensor,
    metric: &ModeMetric,
    ranks: &RankSpec,
    algorithm: Algorithm,
) -> Result<MwcaResult> {
    let x = isometry_apply(f, metric)?;
    let dec = algorithm.decompose(&x, ranks)?;
    assemble(f.clone(), x, dec, metric.clone(), None, algorithm)
}

/// Multiway correspondence analysis of a contingency table.
pub fn run_mwca(table: &ContingencyTable, ranks: &RankSpec, algorithm: Algorithm) -> Result<MwcaResult> {
    let f = relative_frequencies(table)?;
    mwca_of_frequencies(&f, ranks, algorithm)
}

/// MWCA of a tensor that already holds relative frequencies (or any
/// nonnegative tensor with positive marginals).
pub fn mwca_of_frequencies(f: &DenseTensor, ranks: &RankSpec, algorithm: Algorithm) -> Result<MwcaResult> {
    let m = marginals(f)?;
    let metric = ca_metric(&m)?;
    let x = isometry_apply(f, &metric)?;
    let dec = algorithm.decompose(&x, ranks)?;
    assemble(f.clone(), x, dec, metric, Some(m), algorithm)
}

fn invertible_sigma(dec: &TuckerDecomposition) -> Result<Vec<Vec<f64>>> {
    dec.mode_sigma
        .iter()
        .enumerate()
        .map(|(pos, s)| {
            let s1 = s.first().copied().unwrap_or(0.0);
            match s.iter().position(|&v| !(v > RANK_TOL * s1) || !(v > 0.0)) {
                Some(i) => Err(Error::SingularSigma {
                    mode: pos + 1,
                    index: i + 1,
                }),
                None => Ok(s.iter().map(|v| 1.0 / v).collect()),
            }
        })
        .collect()
}

fn assemble(
    f: DenseTensor,
    x: DenseTensor,
    dec: TuckerDecomposition,
    metric: ModeMetric,
    marginals: Option<Marginals>,
    algorithm: Algorithm,
) -> Result<MwcaResult> {
    let inv_sigma = invertible_sigma(&dec)?;
    let d = dec.order();
    let mut y = Vec::with_capacity(d);
    let mut w = Vec::with_capacity(d);
    let mut z = Vec::with_capacity(d);
    for mode in 1..=d {
        let mut ym = dec.factors[mode - 1].clone();
        for (j, s) in dec.mode_sigma[mode - 1].iter().enumerate() {
            ym.column_mut(j).scale_mut(*s);
        }
        let weights = &metric.weights()[mode - 1];
        let mut wm = ym.clone();
        let mut zm = ym.clone();
        for (i, &wi) in weights.iter().enumerate() {
            wm.row_mut(i).unscale_mut(wi);
            zm.row_mut(i).scale_mut(wi);
        }
        y.push(ym);
        w.push(wm);
        z.push(zm);
    }
    let inv: Vec<DenseMatrix> = inv_sigma
        .iter()
        .map(|s| DenseMatrix::from_diagonal(&DVector::from_column_slice(s)))
        .collect();
    let ops: Vec<Option<&DenseMatrix>> = inv.iter().map(Some).collect();
    let b = ttm(&dec.core, &ops)?;
    let inertia = dec
        .mode_sigma
        .iter()
        .map(|s| s.iter().map(|v| v * v).collect())
        .collect();
    Ok(MwcaResult {
        frequencies: f,
        transformed: x,
        decomposition: dec,
        y,
        w,
        z,
        b,
        metric,
        marginals,
        inertia,
        algorithm,
    })
}

/// Classical two-way correspondence analysis.
#[derive(Clone, Debug)]
pub struct CaResult {
    pub sigma: Vec<f64>,
    pub row_y: DenseMatrix,
    pub col_y: DenseMatrix,
    pub row_w: DenseMatrix,
    pub col_w: DenseMatrix,
    pub row_z: DenseMatrix,
    pub col_z: DenseMatrix,
    pub row_masses: Vec<f64>,
    pub col_masses: Vec<f64>,
    /// `D_r^{-1/2} P D_c^{-1/2}`.
    pub transformed: DenseMatrix,
}

/// CA of a matrix of counts at `rank` (numerical rank when `None`).
pub fn run_ca(counts: &DenseMatrix, rank: Option<usize>) -> Result<CaResult> {
    let total = counts.sum();
    if !(total > 0.0) {
        return Err(Error::EmptyTable);
    }
    let p = counts / total;
    let a_tilde = ca_transform(&p)?;
    let rows: Vec<f64> = p.column_sum().iter().copied().collect();
    let cols: Vec<f64> = p.row_sum().iter().copied().collect();
    let full = svd(&a_tilde, None)?;
    let available = full.numerical_rank();
    let r = rank.unwrap_or(available);
    if r == 0 {
        return Err(Error::ZeroRank { mode: 1 });
    }
    if r > available {
        return Err(Error::RankTooLarge {
            mode: 1,
            requested: r,
            available,
        });
    }
    let sigma = full.sigma[..r].to_vec();
    let mut row_y = full.u.columns(0, r).into_owned();
    let mut col_y = full.v.columns(0, r).into_owned();
    for (j, s) in sigma.iter().enumerate() {
        row_y.column_mut(j).scale_mut(*s);
        col_y.column_mut(j).scale_mut(*s);
    }
    let scale_rows = |m: &DenseMatrix, masses: &[f64], power: f64| {
        let mut out = m.clone();
        for (i, mass) in masses.iter().enumerate() {
            out.row_mut(i).scale_mut(mass.powf(power));
        }
        out
    };
    Ok(CaResult {
        row_w: scale_rows(&row_y, &rows, 0.5),
        col_w: scale_rows(&col_y, &cols, 0.5),
        row_z: scale_rows(&row_y, &rows, -0.5),
        col_z: scale_rows(&col_y, &cols, -0.5),
        sigma,
        row_y,
        col_y,
        row_masses: rows,
        col_masses: cols,
        transformed: a_tilde,
    })
}

/// CA of the mode-`mode` unfolding of a table.
pub fn run_ca_unfolded(table: &ContingencyTable, mode: usize, rank: Option<usize>) -> Result<CaResult> {
    run_ca(&unfold(table.counts(), mode)?, rank)
}

/// `D_r^{-1/2} P D_c^{-1/2}` with row and column sums of `p` as masses.
pub fn ca_transform(p: &DenseMatrix) -> Result<DenseMatrix> {
    let rows = p.column_sum();
    let cols = p.row_sum();
    if let Some(i) = rows.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::ZeroMarginal { mode: 1, index: i + 1 });
    }
    if let Some(j) = cols.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::ZeroMarginal { mode: 2, index: j + 1 });
    }
    let mut out = p.clone();
    for i in 0..out.nrows() {
        for j in 0..out.ncols() {
            out[(i, j)] /= (rows[i] * cols[j]).sqrt();
        }
    }
    Ok(out)
}

/// The two isometric images of a frequency tensor compared at mode `k`:
/// `F̃^(k)`, the unfolding of the tensor isometry, and `Ã_k`, the matrix
/// isometry of the unfolding.
pub fn ca_mwca_images(f: &DenseTensor, k: usize) -> Result<(DenseMatrix, DenseMatrix)> {
    let metric = ca_metric(&marginals(f)?)?;
    let f_tilde = unfold(&isometry_apply(f, &metric)?, k)?;
    let a_tilde = ca_transform(&unfold(f, k)?)?;
    Ok((f_tilde, a_tilde))
}

/// `e = ‖F̃ − Ã‖ / ‖F̃‖`.
pub fn relative_error_ca_mwca(f_tilde: &DenseMatrix, a_tilde: &DenseMatrix) -> Result<f64> {
    if f_tilde.shape() != a_tilde.shape() {
        return Err(Error::ShapeMismatch(format!(
            "{:?} vs {:?}",
            f_tilde.shape(),
            a_tilde.shape()
        )));
    }
    let denom = f_tilde.norm();
    if !(denom > 0.0) {
        return Err(Error::ZeroDenominator);
    }
    Ok((f_tilde - a_tilde).norm() / denom)
}
