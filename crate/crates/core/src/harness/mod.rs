//! Benchmark orchestration: run methods over datasets, calibrate their
//! indexes against random ensembles, score them against ground truth and
//! write the reports.

mod config;
mod report;
mod run;
mod summary;

use std::fmt;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::indexes::{IndexName, InternalIndexVector};

pub use config::{BenchmarkConfig, DatasetConfig, EnsembleConfig, KMeansConfig, Scaling};
pub use report::{emit_reports, format_number, BenchmarkReport};
pub use run::{
    calibrate_reference, prepare_dataset, run_benchmark, run_dataset, BenchmarkOutcome, Calibrator, DatasetFailure,
    DatasetRun, IndexReport, PoolSummary, PreparedDataset, TRUTH_METHOD,
};
pub use summary::{pca_method_map, summarize, MethodSummary, PcaMap, SummaryEntry, MAP_COLUMNS};

/// Column id of the density-mode aggregate.
pub const DMODE: &str = "dmode";

/// Ids of every calibrated column, in report order: the internal indexes followed by `dmode`.
pub fn calibrated_columns() -> Vec<&'static str> {
    IndexName::ALL.iter().map(|i| i.id()).chain([DMODE]).collect()
}

/// One optional value per internal index.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IndexValues([Option<f64>; IndexName::ALL.len()]);

impl IndexValues {
    pub fn get(&self, index: IndexName) -> Option<f64> {
        self.0[index.position()]
    }

    pub fn set(&mut self, index: IndexName, value: Option<f64>) {
        self.0[index.position()] = value;
    }

    pub fn iter(&self) -> impl Iterator<Item = (IndexName, Option<f64>)> + '_ {
        IndexName::ALL.into_iter().map(|i| (i, self.get(i)))
    }
}

impl From<&InternalIndexVector> for IndexValues {
    fn from(v: &InternalIndexVector) -> Self {
        let mut out = IndexValues::default();
        for (i, x) in v.iter() {
            out.set(i, x);
        }
        out
    }
}

impl Serialize for IndexValues {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(IndexName::ALL.len()))?;
        for (i, v) in self.iter() {
            map.serialize_entry(i.id(), &v)?;
        }
        map.end()
    }
}

impl fmt::Display for IndexValues {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.iter() {
            writeln!(f, "{},{}", i, v.map_or_else(|| "NA".to_string(), format_number))?;
        }
        Ok(())
    }
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool when `None`.
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Config(format!("cannot start {t} worker threads: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
