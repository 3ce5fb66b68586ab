//! Per-method aggregation over datasets and the PCA map of methods.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::calibrated_columns;
use super::run::IndexReport;
use crate::error::{Error, Result};

/// Columns entering the method map: the eleven headline indexes, with the
/// two density-mode indexes represented by their aggregate.
pub const MAP_COLUMNS: [&str; 11] = [
    "avewithin",
    "maxdiameter",
    "widestgap",
    "sindex",
    "pearsongamma",
    "dmode",
    "denscut",
    "entropy",
    "kdnorm",
    "cvnnd",
    "asw",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryEntry {
    pub column: String,
    pub mean: Option<f64>,
    /// Number of datasets with a calibrated value.
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: String,
    /// Number of reports (datasets) seen for this method.
    pub reports: usize,
    pub entries: Vec<SummaryEntry>,
}

impl MethodSummary {
    fn entry(&self, column: &str) -> Option<&SummaryEntry> {
        self.entries.iter().find(|e| e.column == column)
    }

    pub fn mean(&self, column: &str) -> Option<f64> {
        self.entry(column).and_then(|e| e.mean)
    }

    pub fn count(&self, column: &str) -> usize {
        self.entry(column).map_or(0, |e| e.count)
    }
}

/// Mean calibrated value per method and column over the non-missing reports.
///
/// Methods appear in order of their first report.
pub fn summarize<'a>(reports: impl IntoIterator<Item = &'a IndexReport>) -> Vec<MethodSummary> {
    let columns = calibrated_columns();
    let mut methods: Vec<(String, usize, Vec<(f64, usize)>)> = Vec::new();
    for r in reports {
        let pos = match methods.iter().position(|(m, _, _)| *m == r.method) {
            Some(pos) => pos,
            None => {
                methods.push((r.method.clone(), 0, vec![(0.0, 0); columns.len()]));
                methods.len() - 1
            }
        };
        let (_, seen, acc) = &mut methods[pos];
        *seen += 1;
        for (slot, col) in acc.iter_mut().zip(&columns) {
            if let Some(v) = r.calibrated_column(col) {
                slot.0 += v;
                slot.1 += 1;
            }
        }
    }
    methods
        .into_iter()
        .map(|(method, reports, acc)| MethodSummary {
            method,
            reports,
            entries: columns
                .iter()
                .zip(acc)
                .map(|(col, (sum, count))| SummaryEntry {
                    column: col.to_string(),
                    mean: (count > 0).then(|| sum / count as f64),
                    count,
                })
                .collect(),
        })
        .collect()
}

/// Principal components of the method × index matrix of summary means.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcaMap {
    pub methods: Vec<String>,
    pub columns: Vec<String>,
    /// Number of components emitted (2, or 1 for a rank-one matrix).
    pub components: usize,
    /// Per method, its score on each emitted component.
    pub scores: Vec<Vec<f64>>,
    /// Per emitted component, the unit loading vector over `columns`.
    pub loadings: Vec<Vec<f64>>,
    /// All eigenvalues of the covariance matrix, descending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvalues as fractions of the total variance.
    pub explained: Vec<f64>,
    /// Sum of the column variances of the centered matrix.
    pub total_variance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// PCA of the summary means over the map columns defined for every method.
pub fn pca_method_map(summaries: &[MethodSummary]) -> Result<PcaMap> {
    let m = summaries.len();
    if m < 2 {
        return Err(Error::Pca(format!("need at least 2 methods, got {m}")));
    }
    let columns: Vec<&str> = MAP_COLUMNS
        .iter()
        .copied()
        .filter(|c| summaries.iter().all(|s| s.mean(c).is_some()))
        .collect();
    let v = columns.len();
    if v < 2 {
        return Err(Error::Pca(format!(
            "need at least 2 indexes defined for every method, got {v}"
        )));
    }

    let mut x = DMatrix::from_fn(m, v, |i, j| summaries[i].mean(columns[j]).unwrap());
    for j in 0..v {
        let mean = x.column(j).mean();
        x.column_mut(j).add_scalar_mut(-mean);
    }
    let cov = x.transpose() * &x / (m - 1) as f64;
    let total_variance = cov.trace();
    if !(total_variance > 0.0) {
        return Err(Error::Pca("all methods have identical summaries".into()));
    }

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..v).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&c| eig.eigenvalues[c]).collect();
    let rank = eigenvalues.iter().filter(|&&l| l > 1e-10 * total_variance).count();
    let components = rank.min(2);
    let note = (rank < 2).then(|| format!("matrix has rank {rank}; one component emitted"));

    let loadings: Vec<Vec<f64>> = order[..components]
        .iter()
        .map(|&c| {
            let mut l: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
            // fix the sign so the largest loading is positive
            let big = l
                .iter()
                .copied()
                .fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
            if big < 0.0 {
                l.iter_mut().for_each(|x| *x = -*x);
            }
            l
        })
        .collect();
    let scores = (0..m)
        .map(|i| {
            loadings
                .iter()
                .map(|l| x.row(i).iter().zip(l).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect();

    Ok(PcaMap {
        methods: summaries.iter().map(|s| s.method.clone()).collect(),
        columns: columns.iter().map(|c| c.to_string()).collect(),
        components,
        scores,
        loadings,
        explained: eigenvalues.iter().map(|l| l / total_variance).collect(),
        eigenvalues,
        total_variance,
        note,
    })
}
