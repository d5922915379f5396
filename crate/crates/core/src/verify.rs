//! Executable checks of the inter-cloud identities.
//!
//! * component link, Euclidean: `Y_µ = X^(µ) (Y_d ⊗ … ⊗ Y_{µ+1} ⊗ Y_{µ−1} ⊗ … ⊗ Y_1) (B^(µ))ᵀ`
//! * component link, metric: the same with `W_η` replaced by `M_η² W_η` and `X` by `F`
//! * barycentric: `(z^µ_i)_ℓ = 1/σ^µ_ℓ Σ F_{…i…}/f^µ_i Π_{η≠µ} (z^η_{i_η})_{ℓ_η} (B_µ)_{ℓ_1…ℓ_d}`
//!
//! Residuals are `max |LHS − RHS| / max(1, ‖LHS‖_∞)`.

use crate::error::{Error, Result};
use crate::metric::Marginals;
use crate::mwca::MwcaResult;
use crate::tensor::{ttm, unfold, DenseMatrix, DenseTensor};
use crate::decompose::{TuckerDecomposition, RANK_TOL};
use nalgebra::DVector;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Barycentric weight families must sum to one within this bound.
pub const WEIGHT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    ComponentLinkEuclidean,
    ComponentLinkMetric,
    Barycentric,
}

impl Check {
    pub fn name(&self) -> &'static str {
        match self {
            Check::ComponentLinkEuclidean => "component_link_euclidean",
            Check::ComponentLinkMetric => "component_link_metric",
            Check::Barycentric => "barycentric",
        }
    }
}

/// Which tensor the identities are evaluated on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// The analysed tensor itself.
    Original,
    /// The rank-r reconstruction with its own exact HOSVD.
    Reconstruction,
}

impl Target {
    pub fn name(&self) -> &'static str {
        match self {
            Target::Original => "original",
            Target::Reconstruction => "reconstruction",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub check: Check,
    pub mode: usize,
    pub max_abs_residual: f64,
    pub relative_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub ranks: Vec<usize>,
    pub target: Target,
    /// Largest `|Σ_{others} F/f^µ_i − 1|`; barycentric checks only.
    pub weight_sum_defect: Option<f64>,
}

impl VerificationReport {
    fn build(
        check: Check,
        mode: usize,
        lhs: &DenseMatrix,
        rhs: &DenseMatrix,
        ranks: &[usize],
        weight_sum_defect: Option<f64>,
    ) -> Self {
        let (max_abs_residual, relative_residual) = residual(lhs, rhs);
        let mut r = Self {
            check,
            mode,
            max_abs_residual,
            relative_residual,
            tolerance: DEFAULT_TOLERANCE,
            passed: false,
            ranks: ranks.to_vec(),
            target: Target::Original,
            weight_sum_defect,
        };
        r.evaluate();
        r
    }

    fn evaluate(&mut self) {
        let weights_ok = self.weight_sum_defect.is_none_or(|d| d <= WEIGHT_TOLERANCE);
        self.passed = self.relative_residual <= self.tolerance && weights_ok;
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.evaluate();
        self
    }

    pub fn with_target(mut self, target: Target) -> Self {
        self.target = target;
        self
    }
}

/// `(max |L − R|, max |L − R| / max(1, ‖L‖_∞))`. Non-finite entries count as
/// an infinite residual.
pub fn residual(lhs: &DenseMatrix, rhs: &DenseMatrix) -> (f64, f64) {
    if lhs.shape() != rhs.shape() {
        return (f64::INFINITY, f64::INFINITY);
    }
    let mut worst = 0.0f64;
    for (a, b) in lhs.iter().zip(rhs.iter()) {
        let d = (a - b).abs();
        if !d.is_finite() {
            return (f64::INFINITY, f64::INFINITY);
        }
        worst = worst.max(d);
    }
    let scale = lhs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    (worst, worst / scale)
}

/// `T^(µ) (A_d ⊗ … ⊗ A_{µ+1} ⊗ A_{µ−1} ⊗ … ⊗ A_1)`, evaluated as the mode-µ
/// unfolding of `(A_1ᵀ, …, I, …, A_dᵀ) T`.
pub fn kron_chain_apply(t: &DenseTensor, factors: &[DenseMatrix], mode: usize) -> Result<DenseMatrix> {
    if factors.len() != t.order() {
        return Err(Error::ShapeMismatch(format!(
            "{} factors for a tensor of order {}",
            factors.len(),
            t.order()
        )));
    }
    let ts: Vec<DenseMatrix> = factors.iter().map(|m| m.transpose()).collect();
    let ops: Vec<Option<&DenseMatrix>> = ts
        .iter()
        .enumerate()
        .map(|(pos, m)| if pos + 1 == mode { None } else { Some(m) })
        .collect();
    unfold(&ttm(t, &ops)?, mode)
}

fn check_mode(order: usize, mode: usize) -> Result<()> {
    if mode == 0 || mode > order {
        return Err(Error::ModeOutOfRange { mode, order });
    }
    Ok(())
}

fn check_sigma(sigma: &[Vec<f64>]) -> Result<()> {
    for (pos, s) in sigma.iter().enumerate() {
        let s1 = s.first().copied().unwrap_or(0.0);
        if let Some(i) = s.iter().position(|&v| !(v > 0.0) || !(v > RANK_TOL * s1)) {
            return Err(Error::SingularSigma {
                mode: pos + 1,
                index: i + 1,
            });
        }
    }
    Ok(())
}

fn diag(v: &[f64]) -> DenseMatrix {
    DenseMatrix::from_diagonal(&DVector::from_column_slice(v))
}

/// Euclidean component link for mode `mode` of `x` decomposed as `dec`.
pub fn verify_component_link_euclidean(
    x: &DenseTensor,
    dec: &TuckerDecomposition,
    mode: usize,
) -> Result<VerificationReport> {
    check_mode(x.order(), mode)?;
    if dec.order() != x.order() {
        return Err(Error::ShapeMismatch("decomposition order differs from tensor".into()));
    }
    check_sigma(&dec.mode_sigma)?;
    let y: Vec<DenseMatrix> = dec
        .factors
        .iter()
        .zip(&dec.mode_sigma)
        .map(|(u, s)| u * diag(s))
        .collect();
    let inv: Vec<DenseMatrix> = dec
        .mode_sigma
        .iter()
        .map(|s| diag(&s.iter().map(|v| 1.0 / v).collect::<Vec<_>>()))
        .collect();
    let b = ttm(&dec.core, &inv.iter().map(Some).collect::<Vec<_>>())?;
    let rhs = kron_chain_apply(x, &y, mode)? * unfold(&b, mode)?.transpose();
    Ok(VerificationReport::build(
        Check::ComponentLinkEuclidean,
        mode,
        &y[mode - 1],
        &rhs,
        &dec.ranks,
        None,
    ))
}

/// Metric component link `W_µ = F^(µ)(⊗ M_η² W_η)(B^(µ))ᵀ`.
pub fn verify_component_link_metric(
    f: &DenseTensor,
    res: &MwcaResult,
    mode: usize,
) -> Result<VerificationReport> {
    check_mode(f.order(), mode)?;
    let d = res.order();
    if f.order() != d
        || res
            .metric
            .weights()
            .iter()
            .zip(f.shape())
            .any(|(w, &n)| w.len() != n)
    {
        return Err(Error::ShapeMismatch("metric does not match tensor".into()));
    }
    check_sigma(&res.decomposition.mode_sigma)?;
    let weighted: Vec<DenseMatrix> = (1..=d)
        .map(|eta| diag(&res.metric.squared(eta)) * &res.w[eta - 1])
        .collect();
    let rhs = kron_chain_apply(f, &weighted, mode)? * unfold(&res.b, mode)?.transpose();
    Ok(VerificationReport::build(
        Check::ComponentLinkMetric,
        mode,
        &res.w[mode - 1],
        &rhs,
        &res.decomposition.ranks,
        None,
    ))
}

/// `Σ_{i_η, η≠µ} F_{i_1…i_d} / f^µ_{i_µ}` for every `i_µ`.
pub fn barycentric_weight_sums(f: &DenseTensor, marginals: &Marginals, mode: usize) -> Result<Vec<f64>> {
    check_mode(f.order(), mode)?;
    let fm = marginals.mode(mode);
    let unf = unfold(f, mode)?;
    Ok((0..unf.nrows())
        .map(|i| unf.row(i).iter().map(|v| v / fm[i]).sum())
        .collect())
}

/// Scaled barycentric relation on every row of `Z_µ`. Requires the CA metric
/// and a decomposition at full multilinear rank.
pub fn verify_barycentric(res: &MwcaResult, mode: usize) -> Result<VerificationReport> {
    let d = res.order();
    check_mode(d, mode)?;
    let marg = res.marginals.as_ref().ok_or_else(|| {
        Error::Hypothesis("barycentric relation needs the correspondence-analysis metric".into())
    })?;
    if res.decomposition.is_truncated() {
        return Err(Error::Hypothesis(format!(
            "barycentric relation needs full multilinear rank, got {:?} for mode ranks {:?}",
            res.decomposition.ranks, res.decomposition.input_mode_ranks
        )));
    }
    check_sigma(&res.decomposition.mode_sigma)?;
    let f = &res.frequencies;
    let sums = barycentric_weight_sums(f, marg, mode)?;
    let defect = sums.iter().fold(0.0f64, |m, s| m.max((s - 1.0).abs()));

    // G = (Z_1, …, Σ-scaled B at µ, …, Z_d): inner sums over the ℓ_η.
    let b_mu = res.b_scaled(mode)?;
    let ops: Vec<Option<&DenseMatrix>> = (1..=d)
        .map(|eta| if eta == mode { None } else { Some(&res.z[eta - 1]) })
        .collect();
    let g = unfold(&ttm(&b_mu, &ops)?, mode)?;
    let fm = unfold(f, mode)?;
    let weights = marg.mode(mode);
    let sigma = res.sigma(mode);
    let mut rhs = &fm * g.transpose();
    for i in 0..rhs.nrows() {
        for (l, s) in sigma.iter().enumerate() {
            rhs[(i, l)] /= weights[i] * s;
        }
    }
    Ok(VerificationReport::build(
        Check::Barycentric,
        mode,
        &res.z[mode - 1],
        &rhs,
        &res.decomposition.ranks,
        Some(defect),
    ))
}

/// Runs every applicable check on every mode, in mode order.
///
/// When the decomposition is truncated and `target` is
/// [`Target::Reconstruction`], the component links are evaluated on the rank-r
/// reconstruction. The barycentric relation is only checked at full rank.
pub fn verify_all(res: &MwcaResult, target: Target, tolerance: f64) -> Result<Vec<VerificationReport>> {
    let truncated = res.decomposition.is_truncated();
    let (subject, used) = if truncated && target == Target::Reconstruction {
        (res.on_reconstruction()?, Target::Reconstruction)
    } else {
        (res.clone(), Target::Original)
    };
    let mut out = Vec::new();
    for mode in 1..=res.order() {
        out.push(
            verify_component_link_euclidean(&subject.transformed, &subject.decomposition, mode)?
                .with_tolerance(tolerance)
                .with_target(used),
        );
        out.push(
            verify_component_link_metric(&subject.frequencies, &subject, mode)?
                .with_tolerance(tolerance)
                .with_target(used),
        );
        if !truncated && res.marginals.is_some() {
            out.push(verify_barycentric(res, mode)?.with_tolerance(tolerance));
        }
    }
    Ok(out)
}
