//! The `report.json` document.

use mwca_core::verify::VerificationReport;
use serde::Serialize;

use crate::format::{nums, Num};

#[derive(Serialize, Debug)]
pub struct Report {
    pub command: &'static str,
    pub input: InputInfo,
    pub config: ConfigEcho,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub dropped_slices: Vec<DroppedMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mwca: Option<MwcaSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ca: Option<CaSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_error: Option<RelativeError>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
}

#[derive(Serialize, Debug)]
pub struct InputInfo {
    pub source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub shape: Vec<usize>,
    pub mode_names: Vec<String>,
    pub grand_total: Num,
}

#[derive(Serialize, Debug)]
pub struct ConfigEcho {
    pub ranks: String,
    pub algorithm: &'static str,
    pub ca_mode: usize,
    pub tolerance: Num,
    pub axes: [usize; 2],
    pub zero_slices: &'static str,
    pub plot: bool,
    pub plot_coords: &'static str,
}

#[derive(Serialize, Debug)]
pub struct DroppedMode {
    pub mode: usize,
    pub name: String,
    pub labels: Vec<String>,
}

#[derive(Serialize, Debug)]
pub struct ModeSigma {
    pub mode: usize,
    pub name: String,
    pub sigma: Vec<Num>,
}

#[derive(Serialize, Debug)]
pub struct MwcaSection {
    pub algorithm: &'static str,
    pub ranks: Vec<usize>,
    pub input_mode_ranks: Vec<usize>,
    pub truncated: bool,
    pub sigma: Vec<ModeSigma>,
}

#[derive(Serialize, Debug)]
pub struct CaSection {
    pub mode: usize,
    pub name: String,
    pub shape: [usize; 2],
    pub sigma: Vec<Num>,
    /// Largest coordinate gap between the MWCA mode-k cloud and the CA row
    /// cloud over shared components, each sign-fixed on its own.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_row_cloud_difference: Option<Num>,
}

#[derive(Serialize, Debug)]
pub struct RelativeError {
    pub mode: usize,
    pub value: Num,
}

#[derive(Serialize, Debug)]
pub struct Check {
    pub check: &'static str,
    pub mode: usize,
    pub name: String,
    pub target: &'static str,
    pub ranks: Vec<usize>,
    pub max_abs_residual: Num,
    pub relative_residual: Num,
    pub tolerance: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight_sum_defect: Option<Num>,
    pub passed: bool,
}

impl Check {
    pub fn from_report(r: &VerificationReport, names: &[String]) -> Self {
        Check {
            check: r.check.name(),
            mode: r.mode,
            name: names.get(r.mode - 1).cloned().unwrap_or_default(),
            target: r.target.name(),
            ranks: r.ranks.clone(),
            max_abs_residual: Num(r.max_abs_residual),
            relative_residual: Num(r.relative_residual),
            tolerance: Num(r.tolerance),
            weight_sum_defect: r.weight_sum_defect.map(Num),
            passed: r.passed,
        }
    }
}

#[derive(Serialize, Debug)]
pub struct Verification {
    /// Tensor the identities were evaluated on: `original` or `reconstruction`.
    pub target: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// At truncated ranks, the same checks against the original tensor, for
    /// information only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub original_reading: Option<Vec<Check>>,
}

pub fn mode_sigmas(names: &[String], sigma: &[Vec<f64>]) -> Vec<ModeSigma> {
    names
        .iter()
        .zip(sigma)
        .enumerate()
        .map(|(k, (n, s))| ModeSigma {
            mode: k + 1,
            name: n.clone(),
            sigma: nums(s),
        })
        .collect()
}
