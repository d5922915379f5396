//! Subcommand execution. Every command builds its complete output set in
//! memory first; files are only written once nothing can fail any more.

use std::path::{Path, PathBuf};

use mwca_core::decompose::sign_fix;
use mwca_core::metric::{marginals, relative_frequencies};
use mwca_core::mwca::{
    ca_mwca_images, mwca_of_frequencies, relative_error_ca_mwca, run_ca_unfolded, run_mwca,
    CaResult, MwcaResult,
};
use mwca_core::table::DroppedSlices;
use mwca_core::verify::{verify_all, Target};
use mwca_core::{ContingencyTable, DenseMatrix, DenseTensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{AnalysisConfig, Coords, ZeroSlicePolicy};
use crate::error::{CliError, Result};
use crate::format::{num, nums, Num};
use crate::io::{load_label_order, load_table, Format};
use crate::plot::{biplot_svg, Cloud};
use crate::report::{
    mode_sigmas, CaSection, Check, ConfigEcho, DroppedMode, InputInfo, MwcaSection,
    RelativeError, Report, Verification,
};

/// Where the data comes from.
#[derive(Clone, Debug)]
pub enum Source {
    File {
        path: PathBuf,
        format: Option<Format>,
        labels: Option<PathBuf>,
    },
    /// Seeded random positive frequency tensor.
    Random { shape: Vec<usize>, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Mwca,
    Ca { mode: usize },
    Compare { mode: usize },
    Verify,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Mwca => "mwca",
            Command::Ca { .. } => "ca",
            Command::Compare { .. } => "compare",
            Command::Verify => "verify",
        }
    }
}

/// Files to write (name, contents), the report, and whether every
/// verification passed.
#[derive(Debug)]
pub struct Outcome {
    pub files: Vec<(String, String)>,
    pub report: Report,
    pub report_json: String,
    pub verification_passed: bool,
}

impl Outcome {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        let io_err = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CliError::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        for (name, contents) in &self.files {
            let p = dir.join(name);
            std::fs::write(&p, contents).map_err(io_err(&p))?;
        }
        Ok(())
    }
}

/// Parses `4x5x6` and checks it against `order`.
pub fn parse_shape(order: &str, shape: &str) -> Result<Vec<usize>> {
    let d: usize = order
        .parse()
        .map_err(|_| CliError::Config(format!("order must be a positive integer, got '{order}'")))?;
    let dims = shape
        .split(['x', 'X', ','])
        .map(|p| match p.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Config(format!("shape must look like 4x5x6, got '{shape}'"))),
        })
        .collect::<Result<Vec<_>>>()?;
    if d == 0 || dims.len() != d {
        return Err(CliError::Config(format!(
            "shape {shape} has {} modes, expected {d}",
            dims.len()
        )));
    }
    Ok(dims)
}

/// Uniform(0.05, 1) entries normalized to sum to one.
pub fn random_frequencies(shape: &[usize], seed: u64) -> Result<DenseTensor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len: usize = shape.iter().product();
    let data: Vec<f64> = (0..len).map(|_| rng.gen_range(0.05..1.0)).collect();
    let t = DenseTensor::new(shape.to_vec(), data)?;
    Ok(t.scale(1.0 / t.sum()))
}

struct Loaded {
    table: Option<ContingencyTable>,
    frequencies: DenseTensor,
    names: Vec<String>,
    labels: Vec<Vec<String>>,
    dropped: DroppedSlices,
    info: InputInfo,
}

fn load(source: &Source, cfg: &AnalysisConfig) -> Result<Loaded> {
    match source {
        Source::File { path, format, labels } => {
            let format = format.unwrap_or_else(|| Format::from_extension(path));
            let order = labels.as_deref().map(load_label_order).transpose()?;
            let raw = load_table(path, format, order.as_ref())?;
            let (table, dropped) = match cfg.zero_slices {
                ZeroSlicePolicy::Drop => raw.drop_zero_slices()?,
                ZeroSlicePolicy::Error => {
                    check_zero_slices(&raw, path)?;
                    let d = raw.order();
                    (raw, DroppedSlices { per_mode: vec![Vec::new(); d] })
                }
            };
            let info = InputInfo {
                source: path.display().to_string(),
                format: Some(format.to_string()),
                seed: None,
                shape: table.shape().to_vec(),
                mode_names: table.mode_names().to_vec(),
                grand_total: Num(table.grand_total()),
            };
            Ok(Loaded {
                frequencies: relative_frequencies(&table)?,
                names: table.mode_names().to_vec(),
                labels: table.labels().to_vec(),
                table: Some(table),
                dropped,
                info,
            })
        }
        Source::Random { shape, seed } => {
            let f = random_frequencies(shape, *seed)?;
            let names: Vec<String> = (1..=shape.len()).map(|m| format!("mode{m}")).collect();
            let labels = shape
                .iter()
                .map(|&n| (1..=n).map(|i| i.to_string()).collect())
                .collect();
            Ok(Loaded {
                table: None,
                info: InputInfo {
                    source: "random".into(),
                    format: None,
                    seed: Some(*seed),
                    shape: shape.clone(),
                    mode_names: names.clone(),
                    grand_total: Num(f.sum()),
                },
                frequencies: f,
                names,
                labels,
                dropped: DroppedSlices { per_mode: vec![Vec::new(); shape.len()] },
            })
        }
    }
}

fn check_zero_slices(table: &ContingencyTable, path: &Path) -> Result<()> {
    let m = marginals(table.counts())?;
    for (pos, f) in m.per_mode.iter().enumerate() {
        if let Some(i) = f.iter().position(|&v| v <= 0.0) {
            return Err(CliError::input(
                path.display().to_string(),
                format!(
                    "category '{}' of mode '{}' has no observations (use --zero-slices drop)",
                    table.labels()[pos][i],
                    table.mode_names()[pos]
                ),
            ));
        }
    }
    Ok(())
}

fn coordinate_csv(labels: &[String], m: &DenseMatrix) -> String {
    let mut out = String::from("label");
    for j in 1..=m.ncols() {
        out.push_str(&format!(",comp{j}"));
    }
    out.push('\n');
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for (i, label) in labels.iter().enumerate() {
        let mut rec = vec![label.clone()];
        rec.extend(m.row(i).iter().map(|&v| num(v)));
        w.write_record(&rec).expect("writing to memory");
    }
    out.push_str(&String::from_utf8(w.into_inner().expect("writing to memory")).expect("utf-8"));
    out
}

fn sigma_csv(sigma: &[f64]) -> String {
    let total: f64 = sigma.iter().map(|s| s * s).sum();
    let mut out = String::from("component,sigma,inertia,inertia_share\n");
    for (j, s) in sigma.iter().enumerate() {
        let share = if total > 0.0 { s * s / total } else { 0.0 };
        out.push_str(&format!("{},{},{},{}\n", j + 1, num(*s), num(s * s), num(share)));
    }
    out
}

/// File-name safe version of a mode name.
fn slug(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    if s.is_empty() {
        "mode".into()
    } else {
        s
    }
}

fn mwca_files(res: &MwcaResult, names: &[String], labels: &[Vec<String>], files: &mut Vec<(String, String)>) {
    for (m, name) in names.iter().enumerate() {
        let s = slug(name);
        for (tag, coords) in [("Y", &res.y[m]), ("W", &res.w[m]), ("Z", &res.z[m])] {
            files.push((format!("mode-{s}-{tag}.csv"), coordinate_csv(&labels[m], coords)));
        }
        files.push((format!("sigma-{s}.csv"), sigma_csv(res.sigma(m + 1))));
    }
}

fn ca_files(ca: &CaResult, rows: &[String], cols: &[String], files: &mut Vec<(String, String)>) {
    for (tag, r, c) in [
        ("Y", &ca.row_y, &ca.col_y),
        ("W", &ca.row_w, &ca.col_w),
        ("Z", &ca.row_z, &ca.col_z),
    ] {
        files.push((format!("ca-rows-{tag}.csv"), coordinate_csv(rows, r)));
        files.push((format!("ca-cols-{tag}.csv"), coordinate_csv(cols, c)));
    }
    files.push(("ca-sigma.csv".into(), sigma_csv(&ca.sigma)));
}

fn plot_clouds(res: &MwcaResult, names: &[String], labels: &[Vec<String>], cfg: &AnalysisConfig) -> String {
    let (a, b) = cfg.axes;
    let pick = |m: &DenseMatrix, i: usize, c: usize| if c <= m.ncols() { m[(i, c - 1)] } else { 0.0 };
    let clouds: Vec<Cloud> = names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let m = match cfg.plot_coords {
                Coords::Y => &res.y[k],
                Coords::W => &res.w[k],
                Coords::Z => &res.z[k],
            };
            Cloud {
                name: name.clone(),
                labels: labels[k].clone(),
                points: (0..m.nrows()).map(|i| (pick(m, i, a), pick(m, i, b))).collect(),
            }
        })
        .collect();
    let tag = cfg.plot_coords.name();
    biplot_svg(&clouds, &format!("{tag} component {a}"), &format!("{tag} component {b}"))
}

fn verification(res: &MwcaResult, names: &[String], tol: f64) -> Result<Verification> {
    let reports = verify_all(res, Target::Reconstruction, tol)?;
    let checks: Vec<Check> = reports.iter().map(|r| Check::from_report(r, names)).collect();
    let original_reading = if res.decomposition.is_truncated() {
        let orig = verify_all(res, Target::Original, tol)?;
        Some(orig.iter().map(|r| Check::from_report(r, names)).collect())
    } else {
        None
    };
    Ok(Verification {
        target: reports.first().map_or("original", |r| r.target.name()),
        passed: checks.iter().all(|c| c.passed),
        checks,
        original_reading,
    })
}

/// Largest coordinate gap between two clouds over their shared components,
/// each sign-fixed independently.
fn cloud_difference(a: &DenseMatrix, b: &DenseMatrix) -> Result<f64> {
    let k = a.ncols().min(b.ncols());
    let fa = sign_fix(&a.columns(0, k).into_owned(), &DenseMatrix::zeros(1, k))?.0;
    let fb = sign_fix(&b.columns(0, k).into_owned(), &DenseMatrix::zeros(1, k))?.0;
    Ok((fa - fb).iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

pub fn execute(command: Command, source: &Source, cfg: &AnalysisConfig) -> Result<Outcome> {
    cfg.validate()?;
    let loaded = load(source, cfg)?;
    let d = loaded.names.len();
    let ca_mode = match command {
        Command::Ca { mode } | Command::Compare { mode } => AnalysisConfig {
            ca_mode: Some(mode),
            ..cfg.clone()
        }
        .ca_mode_for(d)?,
        _ => cfg.ca_mode_for(d)?,
    };
    if matches!(command, Command::Ca { .. } | Command::Compare { .. }) && loaded.table.is_none() {
        return Err(CliError::Config(format!("{} needs --input", command.name())));
    }
    let mut files = Vec::new();
    let mut passed = true;

    let run_mwca_part = !matches!(command, Command::Ca { .. });
    let mwca = if run_mwca_part {
        let ranks = cfg.ranks.spec();
        Some(match &loaded.table {
            Some(t) => run_mwca(t, &ranks, cfg.algorithm)?,
            None => mwca_of_frequencies(&loaded.frequencies, &ranks, cfg.algorithm)?,
        })
    } else {
        None
    };
    let ca = match (&command, &loaded.table) {
        (Command::Ca { .. } | Command::Compare { .. }, Some(t)) => Some(run_ca_unfolded(t, ca_mode, None)?),
        _ => None,
    };
    let error_at = |k: usize| -> Result<RelativeError> {
        let (ft, at) = ca_mwca_images(&loaded.frequencies, k)?;
        Ok(RelativeError {
            mode: k,
            value: Num(relative_error_ca_mwca(&ft, &at)?),
        })
    };
    let relative_error = match command {
        Command::Verify => None,
        // the matricized comparison may be undefined (empty combined columns)
        Command::Mwca => error_at(ca_mode).ok(),
        _ => Some(error_at(ca_mode)?),
    };

    let mut verification_section = None;
    if let Some(res) = &mwca {
        let v = verification(res, &loaded.names, cfg.tolerance)?;
        passed = v.passed;
        verification_section = Some(v);
        if command != Command::Verify {
            mwca_files(res, &loaded.names, &loaded.labels, &mut files);
            if cfg.plot {
                files.push(("biplot.svg".into(), plot_clouds(res, &loaded.names, &loaded.labels, cfg)));
            }
        }
    }
    let mut ca_section = None;
    if let (Some(ca), Some(table)) = (&ca, &loaded.table) {
        let cols = table.combined_labels(ca_mode, "|")?;
        ca_files(ca, &loaded.labels[ca_mode - 1], &cols, &mut files);
        let diff = match &mwca {
            Some(res) => Some(Num(cloud_difference(&res.y[ca_mode - 1], &ca.row_y)?)),
            None => None,
        };
        ca_section = Some(CaSection {
            mode: ca_mode,
            name: loaded.names[ca_mode - 1].clone(),
            shape: [ca.row_y.nrows(), ca.col_y.nrows()],
            sigma: nums(&ca.sigma),
            max_row_cloud_difference: diff,
        });
    }

    let report = Report {
        command: command.name(),
        input: loaded.info,
        config: ConfigEcho {
            ranks: cfg.ranks.to_string(),
            algorithm: cfg.algorithm.name(),
            ca_mode,
            tolerance: Num(cfg.tolerance),
            axes: [cfg.axes.0, cfg.axes.1],
            zero_slices: cfg.zero_slices.name(),
            plot: cfg.plot,
            plot_coords: cfg.plot_coords.name(),
        },
        dropped_slices: loaded
            .dropped
            .per_mode
            .iter()
            .enumerate()
            .filter(|(_, l)| !l.is_empty())
            .map(|(m, l)| DroppedMode {
                mode: m + 1,
                name: loaded.names[m].clone(),
                labels: l.clone(),
            })
            .collect(),
        mwca: mwca.as_ref().map(|res| MwcaSection {
            algorithm: res.algorithm.name(),
            ranks: res.decomposition.ranks.clone(),
            input_mode_ranks: res.decomposition.input_mode_ranks.clone(),
            truncated: res.decomposition.is_truncated(),
            sigma: mode_sigmas(&loaded.names, &res.decomposition.mode_sigma),
        }),
        ca: ca_section,
        relative_error,
        verification: verification_section,
    };
    let mut report_json =
        serde_json::to_string_pretty(&report).map_err(|e| CliError::Config(e.to_string()))?;
    report_json.push('\n');
    files.push(("report.json".into(), report_json.clone()));
    Ok(Outcome {
        files,
        report,
        report_json,
        verification_passed: passed,
    })
}
