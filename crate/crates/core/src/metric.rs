//! Diagonal metrics on tensor spaces and the correspondence-analysis metric.
//!
//! A [`ModeMetric`] stores the diagonal of `M_µ` for every mode. The induced
//! inner product is `⟨a, b⟩_M = ⟨M a, M b⟩`, and the isometry onto the standard
//! space is `ν(F) = (M_1, …, M_d) F`.

use crate::error::{Error, Result};
use crate::table::ContingencyTable;
use crate::tensor::{scale_modes, unfold, DenseTensor};

#[derive(Clone, Debug, PartialEq)]
pub struct ModeMetric {
    weights: Vec<Vec<f64>>,
}

impl ModeMetric {
    /// Every weight must be finite and strictly positive.
    pub fn new(weights: Vec<Vec<f64>>) -> Result<Self> {
        for (m, w) in weights.iter().enumerate() {
            for (i, &value) in w.iter().enumerate() {
                if !(value.is_finite() && value > 0.0) {
                    return Err(Error::InvalidWeight {
                        mode: m + 1,
                        index: i + 1,
                        value,
                    });
                }
            }
        }
        Ok(Self { weights })
    }

    pub fn identity(shape: &[usize]) -> Self {
        Self {
            weights: shape.iter().map(|&n| vec![1.0; n]).collect(),
        }
    }

    /// Diagonal of `M_µ` for each mode.
    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    /// Diagonal of the mode-`mode` SPD matrix `N_µ = M_µ²`.
    pub fn squared(&self, mode: usize) -> Vec<f64> {
        self.weights[mode - 1].iter().map(|w| w * w).collect()
    }

    pub fn inverse(&self) -> Self {
        Self {
            weights: self
                .weights
                .iter()
                .map(|w| w.iter().map(|x| 1.0 / x).collect())
                .collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.weights.len()
    }

    /// `M_µ x` for a vector living on mode `mode`.
    pub fn apply(&self, mode: usize, x: &[f64]) -> Vec<f64> {
        self.weights[mode - 1].iter().zip(x).map(|(w, v)| w * v).collect()
    }

    /// `M_µ⁻¹ x`.
    pub fn apply_inverse(&self, mode: usize, x: &[f64]) -> Vec<f64> {
        self.weights[mode - 1].iter().zip(x).map(|(w, v)| v / w).collect()
    }

    fn check_shape(&self, t: &DenseTensor) -> Result<()> {
        let ok = self.weights.len() == t.order()
            && self.weights.iter().zip(t.shape()).all(|(w, &n)| w.len() == n);
        if ok {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "metric dimensions {:?} vs tensor shape {:?}",
                self.weights.iter().map(Vec::len).collect::<Vec<_>>(),
                t.shape()
            )))
        }
    }

    fn refs(&self) -> Vec<&[f64]> {
        self.weights.iter().map(Vec::as_slice).collect()
    }
}

/// Per-mode marginal vectors `f^µ` of a (frequency) tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct Marginals {
    pub per_mode: Vec<Vec<f64>>,
}

impl Marginals {
    pub fn mode(&self, mode: usize) -> &[f64] {
        &self.per_mode[mode - 1]
    }

    /// Sum of each marginal vector; equal across modes up to rounding.
    pub fn totals(&self) -> Vec<f64> {
        self.per_mode.iter().map(|f| f.iter().sum()).collect()
    }
}

/// `F = T / Σ T`.
pub fn relative_frequencies(table: &ContingencyTable) -> Result<DenseTensor> {
    let total = table.grand_total();
    if !(total > 0.0) {
        return Err(Error::EmptyTable);
    }
    Ok(table.counts().scale(1.0 / total))
}

/// Row sums of every unfolding.
pub fn marginals(f: &DenseTensor) -> Result<Marginals> {
    let per_mode = (1..=f.order())
        .map(|mode| Ok(unfold(f, mode)?.column_sum().iter().copied().collect()))
        .collect::<Result<_>>()?;
    Ok(Marginals { per_mode })
}

/// Isometry weights `M_µ = D_µ⁻¹` with `D_µ = diag(√f^µ)`.
pub fn ca_metric(m: &Marginals) -> Result<ModeMetric> {
    for (pos, f) in m.per_mode.iter().enumerate() {
        if let Some(i) = f.iter().position(|&v| !(v > 0.0)) {
            return Err(Error::ZeroMarginal {
                mode: pos + 1,
                index: i + 1,
            });
        }
    }
    ModeMetric::new(
        m.per_mode
            .iter()
            .map(|f| f.iter().map(|v| 1.0 / v.sqrt()).collect())
            .collect(),
    )
}

/// `ν(F) = (M_1, …, M_d) F`.
pub fn isometry_apply(f: &DenseTensor, m: &ModeMetric) -> Result<DenseTensor> {
    m.check_shape(f)?;
    scale_modes(f, &m.refs())
}

/// `ν⁻¹(X) = (M_1⁻¹, …, M_d⁻¹) X`.
pub fn isometry_inverse(x: &DenseTensor, m: &ModeMetric) -> Result<DenseTensor> {
    m.check_shape(x)?;
    let inv = m.inverse();
    scale_modes(x, &inv.refs())
}

/// `‖F‖_M` evaluated entrywise: `√(Σ F²_{i_1…i_d} Π_µ w^µ_{i_µ}²)`.
pub fn weighted_norm(f: &DenseTensor, m: &ModeMetric) -> Result<f64> {
    m.check_shape(f)?;
    let mut acc = 0.0;
    f.for_each_indexed(|ix, v| {
        let w: f64 = ix
            .iter()
            .zip(&m.weights)
            .map(|(&i, wm)| wm[i - 1] * wm[i - 1])
            .product();
        acc += v * v * w;
    });
    Ok(acc.sqrt())
}
