//! Reading and writing labeled contingency tables.
//!
//! Two formats are supported. `long-csv` has one row per cell: a header naming
//! the d mode columns followed by a final `count` column. Cells that never
//! appear are zero, and labels are kept in first-appearance order unless a
//! label-order sidecar says otherwise. `dense-json` stores `mode_names`,
//! `labels`, `shape` and `values`, the latter with the first index varying
//! fastest.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use mwca_core::{ContingencyTable, DenseTensor};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    LongCsv,
    DenseJson,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "long-csv" | "csv" => Ok(Format::LongCsv),
            "dense-json" | "json" => Ok(Format::DenseJson),
            other => Err(CliError::UnknownFormat(other.to_string())),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::LongCsv => "long-csv",
            Format::DenseJson => "dense-json",
        })
    }
}

impl Format {
    /// `.json` files are dense-json, everything else long-csv.
    pub fn from_extension(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::DenseJson,
            _ => Format::LongCsv,
        }
    }
}

/// Mode name → labels in the desired order.
pub type LabelOrder = BTreeMap<String, Vec<String>>;

#[derive(Serialize, Deserialize)]
struct DenseTable {
    mode_names: Vec<String>,
    labels: Vec<Vec<String>>,
    shape: Vec<usize>,
    values: Vec<u64>,
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_label_order(path: &Path) -> Result<LabelOrder> {
    serde_json::from_str(&read_to_string(path)?)
        .map_err(|e| CliError::input(path.display().to_string(), format!("label order: {e}")))
}

pub fn load_table(path: &Path, format: Format, order: Option<&LabelOrder>) -> Result<ContingencyTable> {
    let text = read_to_string(path)?;
    let name = path.display().to_string();
    let table = match format {
        Format::LongCsv => parse_long_csv(&text, &name)?,
        Format::DenseJson => parse_dense_json(&text, &name)?,
    };
    match order {
        Some(o) => reorder_labels(&table, o, &name),
        None => Ok(table),
    }
}

pub fn parse_long_csv(text: &str, source: &str) -> Result<ContingencyTable> {
    let err = |msg: String| CliError::input(source, msg);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| err(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.iter().all(String::is_empty) {
        return Err(err("no data rows".into()));
    }
    if header.len() < 2 || !header.last().is_some_and(|h| h.eq_ignore_ascii_case("count")) {
        return Err(err(format!(
            "header must list the mode columns followed by 'count', got {header:?}"
        )));
    }
    let d = header.len() - 1;
    let mode_names = header[..d].to_vec();

    let mut labels: Vec<Vec<String>> = vec![Vec::new(); d];
    let mut index: Vec<HashMap<String, usize>> = vec![HashMap::new(); d];
    let mut cells: Vec<(Vec<usize>, f64)> = Vec::new();
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    for (row, record) in reader.records().enumerate() {
        let line = row + 2;
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths { .. } => {
                err(format!("line {line}: ragged row, expected {} fields", d + 1))
            }
            _ => err(format!("line {line}: {e}")),
        })?;
        let mut ix = Vec::with_capacity(d);
        for m in 0..d {
            let label = &record[m];
            let next = labels[m].len();
            let i = *index[m].entry(label.to_string()).or_insert(next);
            if i == next {
                labels[m].push(label.to_string());
            }
            ix.push(i);
        }
        let raw = &record[d];
        let value: f64 = raw
            .parse()
            .map_err(|_| err(format!("line {line}: count '{raw}' is not a number")))?;
        if !value.is_finite() || value.fract() != 0.0 {
            return Err(err(format!("line {line}: count '{raw}' is not an integer")));
        }
        if value < 0.0 {
            return Err(err(format!("line {line}: negative count {raw}")));
        }
        if let Some(first) = seen.insert(ix.clone(), line) {
            let cell: Vec<&str> = (0..d).map(|m| &record[m]).collect();
            return Err(err(format!(
                "duplicate cell ({}) on lines {first} and {line}",
                cell.join(", ")
            )));
        }
        cells.push((ix, value));
    }
    if cells.is_empty() {
        return Err(err("no data rows".into()));
    }
    let shape: Vec<usize> = labels.iter().map(Vec::len).collect();
    let mut counts = DenseTensor::zeros(shape)?;
    for (ix, value) in cells {
        let one_based: Vec<usize> = ix.iter().map(|i| i + 1).collect();
        counts.set(&one_based, value)?;
    }
    Ok(ContingencyTable::new(counts, mode_names, labels)?)
}

pub fn parse_dense_json(text: &str, source: &str) -> Result<ContingencyTable> {
    let err = |msg: String| CliError::input(source, msg);
    if text.trim().is_empty() {
        return Err(err("no data rows".into()));
    }
    let dense: DenseTable = serde_json::from_str(text).map_err(|e| err(e.to_string()))?;
    if dense.labels.len() != dense.shape.len()
        || dense.labels.iter().zip(&dense.shape).any(|(l, &n)| l.len() != n)
    {
        return Err(err(format!(
            "ragged labels: shape {:?} with label counts {:?}",
            dense.shape,
            dense.labels.iter().map(Vec::len).collect::<Vec<_>>()
        )));
    }
    let values = dense.values.iter().map(|&v| v as f64).collect();
    let counts = DenseTensor::new(dense.shape, values).map_err(|e| err(e.to_string()))?;
    Ok(ContingencyTable::new(counts, dense.mode_names, dense.labels)?)
}

/// Reorders (and possibly extends with zero categories) the labels of every
/// mode named in `order`.
pub fn reorder_labels(table: &ContingencyTable, order: &LabelOrder, source: &str) -> Result<ContingencyTable> {
    let names = table.mode_names();
    for key in order.keys() {
        if !names.contains(key) {
            return Err(CliError::input(source, format!("label order names unknown mode '{key}'")));
        }
    }
    let mut maps: Vec<Vec<Option<usize>>> = Vec::with_capacity(table.order());
    let mut new_labels = Vec::with_capacity(table.order());
    for (m, name) in names.iter().enumerate() {
        let current = &table.labels()[m];
        match order.get(name) {
            None => {
                maps.push((0..current.len()).map(Some).collect());
                new_labels.push(current.clone());
            }
            Some(wanted) => {
                if let Some(missing) = current.iter().find(|l| !wanted.contains(l)) {
                    return Err(CliError::input(
                        source,
                        format!("label '{missing}' of mode '{name}' is missing from the label order"),
                    ));
                }
                let mut uniq = std::collections::HashSet::new();
                if let Some(dup) = wanted.iter().find(|l| !uniq.insert(*l)) {
                    return Err(CliError::input(
                        source,
                        format!("label '{dup}' repeated in the order for mode '{name}'"),
                    ));
                }
                maps.push(wanted.iter().map(|l| current.iter().position(|c| c == l)).collect());
                new_labels.push(wanted.clone());
            }
        }
    }
    let shape: Vec<usize> = new_labels.iter().map(Vec::len).collect();
    let counts = DenseTensor::from_fn(shape, |ix| {
        let mut src = Vec::with_capacity(ix.len());
        for (m, &i) in ix.iter().enumerate() {
            match maps[m][i - 1] {
                Some(j) => src.push(j + 1),
                None => return 0.0,
            }
        }
        table.counts().get(&src).unwrap_or(0.0)
    })?;
    Ok(ContingencyTable::new(counts, names.to_vec(), new_labels)?)
}

pub fn table_to_string(table: &ContingencyTable, format: Format) -> Result<String> {
    match format {
        Format::LongCsv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header: Vec<&str> = table.mode_names().iter().map(String::as_str).collect();
            header.push("count");
            let csv_err = |e: csv::Error| CliError::Config(e.to_string());
            w.write_record(&header).map_err(csv_err)?;
            // every cell, last mode fastest, so first appearance keeps label order
            let shape = table.shape().to_vec();
            let mut ix = vec![1usize; shape.len()];
            loop {
                let mut rec: Vec<String> = ix
                    .iter()
                    .enumerate()
                    .map(|(m, &i)| table.labels()[m][i - 1].clone())
                    .collect();
                rec.push(format!("{}", table.counts().get(&ix).unwrap_or(0.0) as u64));
                w.write_record(&rec).map_err(csv_err)?;
                let mut m = shape.len();
                loop {
                    if m == 0 {
                        let bytes = w.into_inner().map_err(|e| CliError::Config(e.to_string()))?;
                        return String::from_utf8(bytes).map_err(|e| CliError::Config(e.to_string()));
                    }
                    m -= 1;
                    if ix[m] < shape[m] {
                        ix[m] += 1;
                        break;
                    }
                    ix[m] = 1;
                }
            }
        }
        Format::DenseJson => {
            let dense = DenseTable {
                mode_names: table.mode_names().to_vec(),
                labels: table.labels().to_vec(),
                shape: table.shape().to_vec(),
                values: table.counts().data().iter().map(|&v| v as u64).collect(),
            };
            serde_json::to_string_pretty(&dense).map_err(|e| CliError::Config(e.to_string()))
        }
    }
}

pub fn save_table(table: &ContingencyTable, path: &Path, format: Format) -> Result<()> {
    let text = table_to_string(table, format)?;
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn long_csv_basic() {
        let t = parse_long_csv("a,b,count\nx,p,1\ny,q,2\nx,q,3\n", "t").unwrap();
        assert_eq!(t.shape(), &[2, 2]);
        assert_eq!(t.labels()[1], vec!["p", "q"]);
        assert_eq!(t.counts().get(&[2, 1]), Some(0.0));
        assert_eq!(t.counts().get(&[1, 2]), Some(3.0));
    }

    #[test]
    fn empty_inputs() {
        for text in ["", "a,b,count\n"] {
            let e = parse_long_csv(text, "t").unwrap_err().to_string();
            assert!(e.contains("no data rows"), "{e}");
        }
        assert!(parse_dense_json("  ", "t").unwrap_err().to_string().contains("no data rows"));
    }

    #[test]
    fn duplicate_cell_is_named() {
        let e = parse_long_csv("g,a,count\nM,young,1\nM,young,2\n", "t").unwrap_err().to_string();
        assert!(e.contains("duplicate cell (M, young)"), "{e}");
    }

    #[test]
    fn bad_counts() {
        assert!(parse_long_csv("a,count\nx,-1\n", "t").unwrap_err().to_string().contains("negative"));
        assert!(parse_long_csv("a,count\nx,1.5\n", "t").unwrap_err().to_string().contains("integer"));
        assert!(parse_long_csv("a,count\nx,abc\n", "t").is_err());
        assert!(parse_long_csv("a,b,count\nx,1\n", "t").unwrap_err().to_string().contains("ragged"));
        assert!(parse_long_csv("a,b,total\nx,y,1\n", "t").is_err());
    }

    #[test]
    fn dense_json_ragged_labels() {
        let text = r#"{"mode_names":["a","b"],"labels":[["x"],["p","q"]],"shape":[2,2],"values":[1,2,3,4]}"#;
        assert!(parse_dense_json(text, "t").unwrap_err().to_string().contains("ragged"));
    }

    #[test]
    fn unknown_format() {
        assert!(matches!("xlsx".parse::<Format>(), Err(CliError::UnknownFormat(_))));
    }

    #[test]
    fn reorder_extends_and_permutes() {
        let t = parse_long_csv("a,b,count\nx,p,1\ny,q,2\n", "t").unwrap();
        let mut order = LabelOrder::new();
        order.insert("b".into(), vec!["r".into(), "q".into(), "p".into()]);
        let r = reorder_labels(&t, &order, "t").unwrap();
        assert_eq!(r.shape(), &[2, 3]);
        assert_eq!(r.counts().get(&[2, 2]), Some(2.0));
        assert_eq!(r.counts().get(&[1, 3]), Some(1.0));
        assert_eq!(r.counts().get(&[1, 1]), Some(0.0));
        order.insert("b".into(), vec!["p".into()]);
        assert!(reorder_labels(&t, &order, "t").is_err());
    }
}
