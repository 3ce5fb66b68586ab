//! Report files.
//!
//! Written into the output directory:
//!
//! * `dataset_<id>.csv`: one row per method plus `truth`, with raw and
//!   calibrated indexes and the external indexes;
//! * `parallel_coordinates.csv`: long format `dataset,method,index,value` of
//!   the calibrated values, missing values omitted;
//! * `summary.csv`: per-method means over datasets with contributing counts;
//! * `pca_map.csv`, `pca_loadings.csv`, `pca_variance.csv`: the method map;
//! * `report.json`: everything above at full precision, with the
//!   configuration and seeds.
//!
//! CSV numbers carry 6 significant digits and `NA` marks a missing value.
//! Timings are not written, so reruns give identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::calibrated_columns;
use super::config::BenchmarkConfig;
use super::run::BenchmarkOutcome;
use super::summary::{pca_method_map, summarize, MethodSummary, PcaMap};
use crate::error::{Error, Result};
use crate::indexes::IndexName;

/// Formats a number with 6 significant digits.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return "NA".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if (1e-4..1e15).contains(&a) {
        let rounded: f64 = format!("{x:.5e}").parse().expect("formatted float parses");
        format!("{rounded}")
    } else {
        format!("{x:.5e}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".into(), format_number)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Seeds {
    pub master_seed: u64,
    pub ensemble_seed: u64,
}

/// Everything that goes into the report files.
#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkReport {
    /// The configuration as run, without the output directory.
    pub config: BenchmarkConfig,
    pub seeds: Seeds,
    #[serde(flatten)]
    pub outcome: BenchmarkOutcome,
    /// Per-method means over datasets; truth rows are not included.
    pub summaries: Vec<MethodSummary>,
    pub pca: Option<PcaMap>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pca_note: Option<String>,
}

impl BenchmarkReport {
    pub fn assemble(cfg: &BenchmarkConfig, outcome: BenchmarkOutcome) -> Self {
        let summaries = summarize(outcome.method_reports());
        let (pca, pca_note) = match pca_method_map(&summaries) {
            Ok(map) => (Some(map), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let mut config = cfg.clone();
        config.output_dir = None;
        BenchmarkReport {
            seeds: Seeds {
                master_seed: cfg.master_seed,
                ensemble_seed: cfg.ensemble_seed(),
            },
            config,
            outcome,
            summaries,
            pca,
            pca_note,
        }
    }
}

fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "._-".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

const EXTERNAL_COLUMNS: [&str; 6] = ["ari", "vi", "neg_vi", "bcubed_p", "bcubed_r", "bcubed_f"];

/// Writes all report files into `dir` and returns their paths.
pub fn emit_reports(report: &BenchmarkReport, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    if report.config.methods.is_empty() {
        return Err(Error::Config("method list is empty".into()));
    }
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let columns = calibrated_columns();

    let mut header = strings(&["method", "k"]);
    header.extend(IndexName::ALL.iter().map(|i| format!("raw_{i}")));
    header.extend(columns.iter().map(|c| format!("cal_{c}")));
    header.extend(strings(&EXTERNAL_COLUMNS));
    for run in &report.outcome.runs {
        let rows: Vec<Vec<String>> = run
            .reports
            .iter()
            .map(|r| {
                let mut row = vec![r.method.clone(), r.k.to_string()];
                row.extend(r.raw.iter().map(|(_, v)| opt(v)));
                row.extend(columns.iter().map(|c| opt(r.calibrated_column(c))));
                match &r.external {
                    Some(e) => {
                        row.extend([e.ari, e.vi, e.neg_vi, e.bcubed_p, e.bcubed_r, e.bcubed_f].map(format_number))
                    }
                    None => row.extend(EXTERNAL_COLUMNS.map(|_| "NA".to_string())),
                }
                row
            })
            .collect();
        let path = dir.join(format!("dataset_{}.csv", file_stem(&run.dataset)));
        write_csv(&path, &header, &rows)?;
        written.push(path);
    }

    let rows: Vec<Vec<String>> = report
        .outcome
        .reports()
        .flat_map(|r| {
            columns.iter().filter_map(move |c| {
                r.calibrated_column(c)
                    .map(|v| vec![r.dataset.clone(), r.method.clone(), c.to_string(), format_number(v)])
            })
        })
        .collect();
    let path = dir.join("parallel_coordinates.csv");
    write_csv(&path, &strings(&["dataset", "method", "index", "value"]), &rows)?;
    written.push(path);

    let rows: Vec<Vec<String>> = report
        .summaries
        .iter()
        .flat_map(|s| {
            s.entries
                .iter()
                .map(|e| vec![s.method.clone(), e.column.clone(), opt(e.mean), e.count.to_string()])
        })
        .collect();
    let path = dir.join("summary.csv");
    write_csv(&path, &strings(&["method", "index", "mean", "count"]), &rows)?;
    written.push(path);

    if let Some(pca) = &report.pca {
        let pcs: Vec<String> = (1..=pca.components).map(|c| format!("pc{c}")).collect();

        let mut header = strings(&["method"]);
        header.extend(pcs.iter().cloned());
        let rows: Vec<Vec<String>> = pca
            .methods
            .iter()
            .zip(&pca.scores)
            .map(|(m, s)| {
                std::iter::once(m.clone())
                    .chain(s.iter().map(|&v| format_number(v)))
                    .collect()
            })
            .collect();
        let path = dir.join("pca_map.csv");
        write_csv(&path, &header, &rows)?;
        written.push(path);

        let mut header = strings(&["index"]);
        header.extend(pcs);
        let rows: Vec<Vec<String>> = pca
            .columns
            .iter()
            .enumerate()
            .map(|(j, c)| {
                std::iter::once(c.clone())
                    .chain(pca.loadings.iter().map(|l| format_number(l[j])))
                    .collect()
            })
            .collect();
        let path = dir.join("pca_loadings.csv");
        write_csv(&path, &header, &rows)?;
        written.push(path);

        let rows: Vec<Vec<String>> = pca
            .eigenvalues
            .iter()
            .zip(&pca.explained)
            .enumerate()
            .map(|(c, (&l, &f))| vec![format!("pc{}", c + 1), format_number(l), format_number(f)])
            .collect();
        let path = dir.join("pca_variance.csv");
        write_csv(&path, &strings(&["component", "eigenvalue", "explained"]), &rows)?;
        written.push(path);
    }

    let path = dir.join("report.json");
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(-0.123456789), "-0.123457");
        assert_eq!(format_number(123456.7), "123457");
        assert_eq!(format_number(2.5e-7), "2.50000e-7");
        assert_eq!(format_number(f64::NAN), "NA");
    }

    #[test]
    fn file_stems_are_safe() {
        assert_eq!(file_stem("iris v2/raw"), "iris_v2_raw");
        assert_eq!(file_stem("a-b.c_d"), "a-b.c_d");
    }
}
