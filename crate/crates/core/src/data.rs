//! Datasets, condensed distance matrices and partitions.
//!
//! Feature values are stored row-major. Missing cells read from CSV are held
//! as `NaN` until [`impute_mean`] replaces them; every downstream operation
//! requires a complete dataset.

use std::collections::HashMap;
use std::fs;
use std::hash::Hash;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Record of the preprocessing applied to a [`Dataset`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub imputed_cells: usize,
    pub scaled: bool,
}

/// Selects the ground-truth column of a CSV file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TruthColumn {
    /// Zero-based column position.
    Index(usize),
    /// Header name.
    Name(String),
}

/// An n×p numeric dataset with optional ground-truth labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    n: usize,
    p: usize,
    column_names: Vec<String>,
    truth: Option<Partition>,
    provenance: Provenance,
}

fn is_missing_token(cell: &str) -> bool {
    let t = cell.trim();
    t.is_empty() || t.eq_ignore_ascii_case("na")
}

impl Dataset {
    /// Builds a dataset from rows; `NaN` marks a missing cell.
    pub fn new(rows: Vec<Vec<f64>>, column_names: Vec<String>) -> Result<Self> {
        let n = rows.len();
        let p = column_names.len();
        if n < 2 {
            return Err(Error::InvalidDataset(format!("need at least 2 observations, got {n}")));
        }
        if p == 0 {
            return Err(Error::InvalidDataset("need at least 1 variable".into()));
        }
        let mut values = Vec::with_capacity(n * p);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != p {
                return Err(Error::InvalidDataset(format!(
                    "row {i} has {} values, expected {p}",
                    row.len()
                )));
            }
            if row.iter().any(|v| v.is_infinite()) {
                return Err(Error::InvalidDataset(format!("row {i} has an infinite value")));
            }
            values.extend(row);
        }
        Ok(Dataset {
            values,
            n,
            p,
            column_names,
            truth: None,
            provenance: Provenance::default(),
        })
    }

    /// Builds a dataset with generated column names `x1..xp`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        let names = (1..=p).map(|j| format!("x{j}")).collect();
        Self::new(rows, names)
    }

    /// One-dimensional dataset, convenient for small worked examples.
    pub fn from_1d(points: &[f64]) -> Result<Self> {
        Self::from_rows(points.iter().map(|&x| vec![x]).collect())
    }

    pub fn with_truth(mut self, truth: Partition) -> Result<Self> {
        if truth.n() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: truth.n(),
            });
        }
        self.truth = Some(truth);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn truth(&self) -> Option<&Partition> {
        self.truth.as_ref()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_nan()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().skip(j).step_by(self.p).copied()
    }

    /// Returns a copy with every value transformed by `f(row, col, value)`.
    pub fn map_values(&self, f: impl Fn(usize, usize, f64) -> f64) -> Dataset {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(idx, &v)| f(idx / self.p, idx % self.p, v))
            .collect();
        Dataset { values, ..self.clone() }
    }

    /// Returns a copy with the observations reordered so that new row `r` is old row `order[r]`.
    pub fn permute_rows(&self, order: &[usize]) -> Dataset {
        let mut values = Vec::with_capacity(self.values.len());
        for &i in order {
            values.extend_from_slice(self.row(i));
        }
        let truth = self.truth.as_ref().map(|t| {
            let labels: Vec<usize> = order.iter().map(|&i| t.label(i)).collect();
            Partition::from_labels(&labels).expect("non-empty")
        });
        Dataset {
            values,
            truth,
            ..self.clone()
        }
    }
}

/// Reads a comma-separated file with a header row.
///
/// Empty cells and `NA` (any case) are read as missing. When `truth` is
/// given, that column is removed from the features and contiguized into a
/// [`Partition`].
pub fn load_csv(path: impl AsRef<Path>, truth: Option<&TruthColumn>) -> Result<Dataset> {
    let path = path.as_ref();
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(csv_err)?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();

    let truth_idx = match truth {
        None => None,
        Some(TruthColumn::Index(i)) if *i < headers.len() => Some(*i),
        Some(TruthColumn::Index(i)) => return Err(Error::UnknownColumn(i.to_string())),
        Some(TruthColumn::Name(name)) => Some(
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::UnknownColumn(name.clone()))?,
        ),
    };
    let feature_cols: Vec<usize> = (0..headers.len()).filter(|&j| Some(j) != truth_idx).collect();
    let names: Vec<String> = feature_cols.iter().map(|&j| headers[j].clone()).collect();

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        // header is line 1
        let line = r + 2;
        if record.len() != headers.len() {
            return Err(Error::RaggedRow {
                path: path.to_path_buf(),
                row: line,
                found: record.len(),
                expected: headers.len(),
            });
        }
        let mut row = Vec::with_capacity(feature_cols.len());
        for &j in &feature_cols {
            let cell = &record[j];
            if is_missing_token(cell) {
                row.push(f64::NAN);
                continue;
            }
            let v: f64 = cell
                .trim()
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::NonNumeric {
                    path: path.to_path_buf(),
                    row: line,
                    column: headers[j].clone(),
                    value: cell.to_string(),
                })?;
            row.push(v);
        }
        rows.push(row);
        if let Some(t) = truth_idx {
            labels.push(record[t].trim().to_string());
        }
    }

    let dataset = Dataset::new(rows, names)?;
    match truth_idx {
        None => Ok(dataset),
        Some(t) => {
            let truth = Partition::from_labels(&labels)?;
            if truth.k() < 2 {
                return Err(Error::SingleClassTruth(headers[t].clone()));
            }
            dataset.with_truth(truth)
        }
    }
}

/// Replaces each missing cell by the mean of the non-missing cells of its column.
pub fn impute_mean(d: &Dataset) -> Result<Dataset> {
    let mut means = Vec::with_capacity(d.p);
    for j in 0..d.p {
        let (sum, count) = d
            .column(j)
            .filter(|v| !v.is_nan())
            .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
        if count == 0 {
            return Err(Error::FullyMissingColumn(d.column_names[j].clone()));
        }
        means.push(sum / count as f64);
    }
    let imputed = d.missing_count();
    let mut out = d.map_values(|_, j, v| if v.is_nan() { means[j] } else { v });
    out.provenance.imputed_cells += imputed;
    Ok(out)
}

/// Standardizes every column to sample mean 0 and sample variance 1 (denominator n−1).
pub fn scale_zscore(d: &Dataset) -> Result<Dataset> {
    if !d.is_complete() {
        return Err(Error::InvalidDataset(
            "scaling requires a complete dataset; impute first".into(),
        ));
    }
    let n = d.n as f64;
    let mut stats = Vec::with_capacity(d.p);
    for j in 0..d.p {
        let mean = d.column(j).sum::<f64>() / n;
        let var = d.column(j).map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        // relative guard: a column whose spread is at rounding level of its magnitude is constant
        let scale = d.column(j).fold(0.0f64, |m, v| m.max(v.abs()));
        if var.sqrt() <= 1e-14 * scale.max(f64::MIN_POSITIVE) || var == 0.0 {
            return Err(Error::ConstantColumn(d.column_names[j].clone()));
        }
        stats.push((mean, var.sqrt()));
    }
    let mut out = d.map_values(|_, j, v| (v - stats[j].0) / stats[j].1);
    out.provenance.scaled = true;
    Ok(out)
}

/// Pairwise distances stored as the condensed upper triangle, row-major over i<j.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_condensed(n: usize, entries: Vec<f64>) -> Result<Self> {
        let expected = n * n.saturating_sub(1) / 2;
        if entries.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: entries.len(),
            });
        }
        if entries.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::InvalidDataset("distances must be finite and nonnegative".into()));
        }
        Ok(DistanceMatrix { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n);
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Distance between observations `i` and `j`; zero on the diagonal.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.entries[self.offset(i, j)],
            std::cmp::Ordering::Greater => self.entries[self.offset(j, i)],
            std::cmp::Ordering::Equal => 0.0,
        }
    }

    /// Iterates over `(i, j, d)` for all pairs i<j in storage order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n;
        (0..n)
            .flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
            .zip(&self.entries)
            .map(|((i, j), &d)| (i, j, d))
    }
}

/// Euclidean distances between all pairs of observations.
///
/// Rows are computed in parallel; each entry is computed independently so the
/// result does not depend on the thread count.
pub fn euclidean_distances(d: &Dataset) -> Result<DistanceMatrix> {
    if !d.is_complete() {
        return Err(Error::InvalidDataset(
            "distances require a complete dataset; impute first".into(),
        ));
    }
    let n = d.n;
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = d.row(i);
            (i + 1..n)
                .map(|j| {
                    xi.iter()
                        .zip(d.row(j))
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                })
                .collect()
        })
        .collect();
    Ok(DistanceMatrix {
        n,
        entries: rows.concat(),
    })
}

/// A crisp partition of n observations into K nonempty clusters.
///
/// Cluster ids are `0..K` in memory, numbered by first appearance; files
/// written by this crate use `1..K`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
    sizes: Vec<usize>,
}

impl Partition {
    /// Contiguizes arbitrary labels by first appearance.
    pub fn from_labels<T: Hash + Eq + Clone>(raw: &[T]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyPartition);
        }
        let mut ids: HashMap<T, usize> = HashMap::new();
        let mut sizes = Vec::new();
        let labels = raw
            .iter()
            .map(|l| {
                let next = ids.len();
                let id = *ids.entry(l.clone()).or_insert(next);
                if id == sizes.len() {
                    sizes.push(0);
                }
                sizes[id] += 1;
                id
            })
            .collect();
        Ok(Partition {
            labels,
            k: sizes.len(),
            sizes,
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.labels.iter().map(|l| l + 1).collect()
    }

    /// Observation indices of each cluster, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }
}

/// Validates a raw label vector against the expected observation count.
pub fn validate_partition<T: Hash + Eq + Clone>(raw: &[T], n: usize) -> Result<Partition> {
    if raw.is_empty() {
        return Err(Error::EmptyPartition);
    }
    if raw.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: raw.len(),
        });
    }
    Partition::from_labels(raw)
}

/// Reads a partition file: one label per line, with an optional single header line.
///
/// With `n` given, a file of `n + 1` non-empty lines is taken to carry a
/// header. Without `n`, a first line that differs in kind from the rest
/// (non-numeric above numeric labels) is treated as the header.
pub fn read_partition_file(path: impl AsRef<Path>, n: Option<usize>) -> Result<Partition> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines: Vec<&str> = text.lines().map(str::trim).collect();
    while lines.last() == Some(&"") {
        lines.pop();
    }
    if lines.is_empty() {
        return Err(Error::EmptyPartition);
    }
    let has_header = match n {
        Some(n) => lines.len() == n + 1,
        None => {
            let numeric = |s: &str| s.parse::<f64>().is_ok();
            lines.len() > 1 && !numeric(lines[0]) && lines[1..].iter().all(|l| numeric(l))
        }
    };
    if has_header {
        lines.remove(0);
    }
    validate_partition(&lines, n.unwrap_or(lines.len()))
}
