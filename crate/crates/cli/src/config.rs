//! Analysis configuration shared by all subcommands.

use std::fmt;
use std::str::FromStr;

use mwca_core::decompose::RankSpec;
use mwca_core::mwca::Algorithm;
use mwca_core::verify::DEFAULT_TOLERANCE;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum Ranks {
    Full,
    Explicit(Vec<usize>),
}

impl Ranks {
    pub fn spec(&self) -> RankSpec {
        match self {
            Ranks::Full => RankSpec::Full,
            Ranks::Explicit(r) => RankSpec::Explicit(r.clone()),
        }
    }
}

impl FromStr for Ranks {
    type Err = CliError;

    /// `full` or a comma-separated list of positive integers.
    fn from_str(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("full") {
            return Ok(Ranks::Full);
        }
        let ranks = s
            .split(',')
            .map(|p| match p.trim().parse::<usize>() {
                Ok(r) if r > 0 => Ok(r),
                _ => Err(CliError::Config(format!("ranks must be 'full' or positive integers, got '{s}'"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Ranks::Explicit(ranks))
    }
}

impl fmt::Display for Ranks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ranks::Full => f.write_str("full"),
            Ranks::Explicit(r) => {
                let parts: Vec<String> = r.iter().map(usize::to_string).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroSlicePolicy {
    Error,
    Drop,
}

impl FromStr for ZeroSlicePolicy {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "error" => Ok(ZeroSlicePolicy::Error),
            "drop" => Ok(ZeroSlicePolicy::Drop),
            _ => Err(CliError::Config(format!("zero-slice policy must be error or drop, got '{s}'"))),
        }
    }
}

impl ZeroSlicePolicy {
    pub fn name(&self) -> &'static str {
        match self {
            ZeroSlicePolicy::Error => "error",
            ZeroSlicePolicy::Drop => "drop",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coords {
    Y,
    W,
    Z,
}

impl FromStr for Coords {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "y" => Ok(Coords::Y),
            "w" => Ok(Coords::W),
            "z" => Ok(Coords::Z),
            _ => Err(CliError::Config(format!("plot coordinates must be y, w or z, got '{s}'"))),
        }
    }
}

impl Coords {
    pub fn name(&self) -> &'static str {
        match self {
            Coords::Y => "Y",
            Coords::W => "W",
            Coords::Z => "Z",
        }
    }
}

pub fn parse_algorithm(s: &str) -> Result<Algorithm, CliError> {
    match s {
        "hosvd" => Ok(Algorithm::Hosvd),
        "st-hosvd" | "st_hosvd" => Ok(Algorithm::StHosvd),
        "hooi" => Ok(Algorithm::DEFAULT_HOOI),
        _ => Err(CliError::Config(format!("algorithm must be hosvd, st-hosvd or hooi, got '{s}'"))),
    }
}

/// Two distinct 1-based component indices, e.g. `2,3`.
pub fn parse_axes(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Config(format!("axes must be two distinct positive integers, got '{s}'"));
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        &[a, b] if a > 0 && b > 0 && a != b => Ok((a, b)),
        _ => Err(bad()),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisConfig {
    pub ranks: Ranks,
    pub algorithm: Algorithm,
    /// Mode used for the matricized CA comparison; the last mode when unset.
    pub ca_mode: Option<usize>,
    pub tolerance: f64,
    pub axes: (usize, usize),
    pub zero_slices: ZeroSlicePolicy,
    pub plot: bool,
    pub plot_coords: Coords,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            ranks: Ranks::Full,
            algorithm: Algorithm::Hosvd,
            ca_mode: None,
            tolerance: DEFAULT_TOLERANCE,
            axes: (2, 3),
            zero_slices: ZeroSlicePolicy::Error,
            plot: false,
            plot_coords: Coords::Y,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(CliError::Config(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.axes.0 == 0 || self.axes.1 == 0 || self.axes.0 == self.axes.1 {
            return Err(CliError::Config("axes must be distinct positive integers".into()));
        }
        if let Ranks::Explicit(r) = &self.ranks {
            if r.contains(&0) {
                return Err(CliError::Config("ranks must be positive".into()));
            }
        }
        if self.ca_mode == Some(0) {
            return Err(CliError::Config("modes are numbered from 1".into()));
        }
        Ok(())
    }

    /// The CA comparison mode for an order-`d` table.
    pub fn ca_mode_for(&self, d: usize) -> Result<usize, CliError> {
        let k = self.ca_mode.unwrap_or(d);
        if k == 0 || k > d {
            return Err(CliError::Config(format!("mode {k} out of range for a table with {d} modes")));
        }
        Ok(k)
    }
}
