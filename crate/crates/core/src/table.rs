//! Labeled multiway contingency tables.

use crate::error::{Error, Result};
use crate::tensor::{unfold, DenseTensor};

/// A d-way table of nonnegative integer counts with named modes and
/// per-mode category labels.
#[derive(Clone, Debug, PartialEq)]
pub struct ContingencyTable {
    counts: DenseTensor,
    mode_names: Vec<String>,
    labels: Vec<Vec<String>>,
}

impl ContingencyTable {
    pub fn new(counts: DenseTensor, mode_names: Vec<String>, labels: Vec<Vec<String>>) -> Result<Self> {
        let d = counts.order();
        if mode_names.len() != d || labels.len() != d {
            return Err(Error::Labels(format!(
                "order {} table with {} mode names and {} label lists",
                d,
                mode_names.len(),
                labels.len()
            )));
        }
        for (pos, (l, &n)) in labels.iter().zip(counts.shape()).enumerate() {
            if l.len() != n {
                return Err(Error::Labels(format!(
                    "mode {} ({}) has {} categories but {} labels",
                    pos + 1,
                    mode_names[pos],
                    n,
                    l.len()
                )));
            }
        }
        for (position, &value) in counts.data().iter().enumerate() {
            if !value.is_finite() || value < 0.0 || value.fract() != 0.0 {
                return Err(Error::InvalidCount { position, value });
            }
        }
        if !counts.data().iter().any(|&v| v > 0.0) {
            return Err(Error::EmptyTable);
        }
        Ok(Self {
            counts,
            mode_names,
            labels,
        })
    }

    /// Unlabeled table; modes are named `mode1..` and categories `1..n`.
    pub fn unlabeled(counts: DenseTensor) -> Result<Self> {
        let names = (1..=counts.order()).map(|m| format!("mode{m}")).collect();
        let labels = counts
            .shape()
            .iter()
            .map(|&n| (1..=n).map(|i| i.to_string()).collect())
            .collect();
        Self::new(counts, names, labels)
    }

    pub fn counts(&self) -> &DenseTensor {
        &self.counts
    }

    pub fn mode_names(&self) -> &[String] {
        &self.mode_names
    }

    pub fn labels(&self) -> &[Vec<String>] {
        &self.labels
    }

    pub fn order(&self) -> usize {
        self.counts.order()
    }

    pub fn shape(&self) -> &[usize] {
        self.counts.shape()
    }

    pub fn grand_total(&self) -> f64 {
        self.counts.sum()
    }

    /// Labels of the combined column categories of the mode-`mode` unfolding,
    /// in unfolding column order, joined with `sep`.
    pub fn combined_labels(&self, mode: usize, sep: &str) -> Result<Vec<String>> {
        let d = self.order();
        if mode == 0 || mode > d {
            return Err(Error::ModeOutOfRange { mode, order: d });
        }
        let others: Vec<usize> = (0..d).filter(|&a| a + 1 != mode).collect();
        if others.is_empty() {
            return Ok(vec![String::new()]);
        }
        let mut out = vec![String::new()];
        // earlier modes vary fastest
        for (k, &a) in others.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * self.labels[a].len());
            for lab in &self.labels[a] {
                for prefix in &out {
                    if k == 0 {
                        next.push(lab.clone());
                    } else {
                        next.push(format!("{prefix}{sep}{lab}"));
                    }
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Removes every category whose slice sums to zero, repeating until all
    /// marginals are positive.
    pub fn drop_zero_slices(&self) -> Result<(ContingencyTable, DroppedSlices)> {
        let mut current = self.clone();
        let mut dropped = DroppedSlices {
            per_mode: vec![Vec::new(); self.order()],
        };
        loop {
            let mut changed = false;
            for mode in 1..=current.order() {
                let sums = unfold(&current.counts, mode)?.column_sum();
                let keep: Vec<usize> = (0..sums.len()).filter(|&i| sums[i] > 0.0).collect();
                if keep.is_empty() {
                    return Err(Error::EmptyTable);
                }
                if keep.len() == sums.len() {
                    continue;
                }
                for i in (0..sums.len()).filter(|i| !keep.contains(i)) {
                    dropped.per_mode[mode - 1].push(current.labels[mode - 1][i].clone());
                }
                current = current.select(mode, &keep)?;
                changed = true;
            }
            if !changed {
                return Ok((current, dropped));
            }
        }
    }

    /// Sub-table keeping only the given 0-based categories of `mode`.
    fn select(&self, mode: usize, keep: &[usize]) -> Result<Self> {
        let mut shape = self.shape().to_vec();
        shape[mode - 1] = keep.len();
        let src = &self.counts;
        let counts = DenseTensor::from_fn(shape, |ix| {
            let mut orig = ix.to_vec();
            orig[mode - 1] = keep[ix[mode - 1] - 1] + 1;
            src.get(&orig).unwrap_or(0.0)
        })?;
        let mut labels = self.labels.clone();
        labels[mode - 1] = keep.iter().map(|&i| self.labels[mode - 1][i].clone()).collect();
        Self::new(counts, self.mode_names.clone(), labels)
    }
}

/// Labels removed by [`ContingencyTable::drop_zero_slices`], per mode.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DroppedSlices {
    pub per_mode: Vec<Vec<String>>,
}

impl DroppedSlices {
    pub fn is_empty(&self) -> bool {
        self.per_mode.iter().all(|v| v.is_empty())
    }
}
