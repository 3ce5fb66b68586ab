//! The per-dataset pipeline.

use std::time::{Duration, Instant};

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use super::config::{BenchmarkConfig, DatasetConfig, Scaling};
use super::{IndexValues, DMODE};
use crate::calibrate::{dmode_aggregate, PoolStats};
use crate::cluster::{ingest_partition, run_builtin, ClusteringResult, Method};
use crate::data::{
    euclidean_distances, impute_mean, load_csv, scale_zscore, Dataset, DistanceMatrix, Partition, Provenance,
};
use crate::ensemble::generate_ensemble;
use crate::error::{Error, Result};
use crate::external::{external_scores, ExternalScores};
use crate::indexes::{IndexEngine, IndexName, InternalIndexVector};

/// Method id of the ground-truth reference row.
pub const TRUTH_METHOD: &str = "truth";

/// Raw and calibrated indexes of one clustering of one dataset.
///
/// A calibrated value is `None` when its raw value is missing or the pool
/// could not be standardized; the reason is listed in `notes`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexReport {
    pub dataset: String,
    pub method: String,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
    pub raw: IndexValues,
    pub calibrated: IndexValues,
    pub dmode: Option<f64>,
    pub external: Option<ExternalScores>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Wall time for clustering and index evaluation. Kept out of the files.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl IndexReport {
    /// Calibrated value by column id, `dmode` included.
    pub fn calibrated_column(&self, id: &str) -> Option<f64> {
        if id == DMODE {
            return self.dmode;
        }
        id.parse::<IndexName>().ok().and_then(|i| self.calibrated.get(i))
    }

    pub fn is_truth(&self) -> bool {
        self.method == TRUTH_METHOD
    }
}

/// Pool statistics of one index on one dataset, in the oriented scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoolSummary {
    pub index: IndexName,
    /// Number of pooled clusterings with a value for this index.
    pub size: usize,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetRun {
    pub dataset: String,
    pub n: usize,
    pub p: usize,
    pub k: usize,
    pub provenance: Provenance,
    pub ensemble_seed: u64,
    pub ensemble_size: usize,
    pub pools: Vec<PoolSummary>,
    /// Method rows in configuration order, then the truth row if any.
    pub reports: Vec<IndexReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Calibrated values of the ensemble members, in ensemble order.
    #[serde(skip)]
    pub ensemble_calibrated: Vec<IndexValues>,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DatasetFailure {
    pub dataset: String,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkOutcome {
    pub runs: Vec<DatasetRun>,
    pub failures: Vec<DatasetFailure>,
}

impl BenchmarkOutcome {
    pub fn reports(&self) -> impl Iterator<Item = &IndexReport> {
        self.runs.iter().flat_map(|r| &r.reports)
    }

    /// Reports of the configured methods, without the truth rows.
    pub fn method_reports(&self) -> impl Iterator<Item = &IndexReport> {
        self.reports().filter(|r| !r.is_truth())
    }

    pub fn is_partial(&self) -> bool {
        !self.failures.is_empty()
    }
}

/// A dataset after loading, imputation and scaling, with its distances and cluster count.
#[derive(Debug, Clone)]
pub struct PreparedDataset {
    pub id: String,
    pub data: Dataset,
    pub dm: DistanceMatrix,
    pub k: usize,
}

pub fn prepare_dataset(ds: &DatasetConfig) -> Result<PreparedDataset> {
    let mut data = impute_mean(&load_csv(&ds.path, ds.truth_column.as_ref())?)?;
    if ds.scale == Scaling::Zscore {
        data = scale_zscore(&data)?;
    }
    let dm = euclidean_distances(&data)?;
    let id = ds.id();
    let k = match (ds.k, data.truth()) {
        (Some(k), _) => k,
        (None, Some(truth)) => truth.k(),
        (None, None) => {
            return Err(Error::Config(format!("dataset '{id}': no k and no truth column")));
        }
    };
    if k < 1 || k > data.n() {
        return Err(Error::InvalidK { k, n: data.n() });
    }
    Ok(PreparedDataset { id, data, dm, k })
}

/// Standardizes index values against the pooled method and ensemble clusterings of one dataset.
pub struct Calibrator<'a> {
    dataset: String,
    k: usize,
    engine: IndexEngine<'a>,
    pools: Vec<(usize, std::result::Result<PoolStats, String>)>,
}

impl<'a> Calibrator<'a> {
    /// Pools each index over the clusterings where it is defined.
    pub fn new<'v>(
        dataset: &str,
        k: usize,
        engine: IndexEngine<'a>,
        pooled: impl IntoIterator<Item = &'v InternalIndexVector> + Clone,
    ) -> Self {
        let pools = IndexName::ALL
            .iter()
            .map(|&i| {
                let values: Vec<f64> = pooled.clone().into_iter().filter_map(|v| v.get(i)).collect();
                let stats = PoolStats::from_raw(&values, i.orientation()).map_err(|e| e.to_string());
                (values.len(), stats)
            })
            .collect();
        Calibrator {
            dataset: dataset.to_string(),
            k,
            engine,
            pools,
        }
    }

    pub fn engine(&self) -> &IndexEngine<'a> {
        &self.engine
    }

    pub fn pool(&self, index: IndexName) -> Option<&PoolStats> {
        self.pools[index.position()].1.as_ref().ok()
    }

    pub fn pool_summaries(&self) -> Vec<PoolSummary> {
        IndexName::ALL
            .iter()
            .zip(&self.pools)
            .map(|(&index, (size, stats))| PoolSummary {
                index,
                size: *size,
                mean: stats.as_ref().ok().map(|s| s.mean),
                sd: stats.as_ref().ok().map(|s| s.sd),
                note: stats.as_ref().err().cloned(),
            })
            .collect()
    }

    /// Calibrated values and the density-mode aggregate.
    pub fn calibrate(&self, raw: &InternalIndexVector) -> (IndexValues, Option<f64>) {
        let mut out = IndexValues::default();
        for (i, v) in raw.iter() {
            out.set(i, v.zip(self.pool(i)).map(|(v, s)| s.standardize(v)));
        }
        let dmode = out
            .get(IndexName::DensDec)
            .zip(out.get(IndexName::HighDGap))
            .map(|(d, h)| dmode_aggregate(d, h));
        (out, dmode)
    }

    /// Full report row for a partition whose raw indexes are already known.
    pub fn report(
        &self,
        method: &str,
        raw: &InternalIndexVector,
        partition: &Partition,
        truth: Option<&Partition>,
    ) -> IndexReport {
        let (calibrated, dmode) = self.calibrate(raw);
        let mut notes: Vec<String> = raw.failures().iter().map(|(i, why)| format!("{i}: {why}")).collect();
        for (i, v) in raw.iter() {
            if let (Some(_), Err(why)) = (v, &self.pools[i.position()].1) {
                notes.push(format!("{i}: not calibrated: {why}"));
            }
        }
        let external = truth.and_then(|t| match external_scores(t, partition) {
            Ok(s) => Some(s),
            Err(e) => {
                notes.push(format!("external indexes: {e}"));
                None
            }
        });
        IndexReport {
            dataset: self.dataset.clone(),
            method: method.to_string(),
            k: partition.k(),
            seed: None,
            objective: None,
            raw: raw.into(),
            calibrated,
            dmode,
            external,
            notes,
            elapsed: Duration::ZERO,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// The truth partition calibrated against the same pool as the methods, as method `truth`.
pub fn calibrate_reference(cal: &Calibrator<'_>, truth: &Partition) -> IndexReport {
    let start = Instant::now();
    let raw = cal.engine.evaluate(truth);
    let mut report = cal.report(TRUTH_METHOD, &raw, truth, Some(truth));
    report.elapsed = start.elapsed();
    report
}

fn run_method(
    cfg: &BenchmarkConfig,
    ds: &DatasetConfig,
    prep: &PreparedDataset,
    seed: u64,
    m: &Method,
) -> Result<ClusteringResult> {
    match m {
        Method::External(name) => ingest_partition(&ds.external[name], prep.data.n(), Some(name)),
        _ => run_builtin(m, &prep.data, &prep.dm, prep.k, cfg.kmeans.restarts, seed),
    }
}

/// Runs the whole pipeline on dataset `index` of the configuration.
pub fn run_dataset(cfg: &BenchmarkConfig, index: usize) -> Result<DatasetRun> {
    let start = Instant::now();
    let ds = &cfg.datasets[index];
    let prep = prepare_dataset(ds)?;

    let clusterings: Vec<(ClusteringResult, Duration)> = cfg
        .methods
        .par_iter()
        .enumerate()
        .map(|(mi, m)| {
            let t = Instant::now();
            let r = run_method(cfg, ds, &prep, cfg.method_seed(index, mi), m)
                .map_err(|e| Error::Config(format!("method '{m}': {e}")))?;
            Ok((r, t.elapsed()))
        })
        .collect::<Result<_>>()?;

    let spec = cfg.ensemble_spec(index, prep.k);
    let ensemble = generate_ensemble(&prep.dm, &spec)?;

    let engine = IndexEngine::new(&prep.data, &prep.dm, cfg.index_params);
    let method_raw: Vec<(InternalIndexVector, Duration)> = clusterings
        .par_iter()
        .map(|(c, _)| {
            let t = Instant::now();
            (engine.evaluate(&c.partition), t.elapsed())
        })
        .collect();
    let ensemble_raw: Vec<InternalIndexVector> = ensemble.par_iter().map(|m| engine.evaluate(&m.partition)).collect();

    let pooled = ensemble_raw.iter().chain(method_raw.iter().map(|(v, _)| v));
    let cal = Calibrator::new(&prep.id, prep.k, engine, pooled);
    let truth = prep.data.truth();

    let mut reports: Vec<IndexReport> = clusterings
        .iter()
        .zip(&method_raw)
        .map(|((c, t_cluster), (raw, t_index))| {
            let mut r = cal.report(&c.method.to_string(), raw, &c.partition, truth);
            r.seed = c.method.is_builtin().then_some(c.seed_used);
            r.objective = c.objective;
            r.elapsed = *t_cluster + *t_index;
            r
        })
        .collect();

    let mut notes = Vec::new();
    match truth {
        Some(t) => reports.push(calibrate_reference(&cal, t)),
        None => notes.push("no ground truth: reference row and external indexes skipped".to_string()),
    }
    let ensemble_calibrated = ensemble_raw.iter().map(|r| cal.calibrate(r).0).collect();

    info!("dataset '{}' done in {:.2?}", prep.id, start.elapsed());
    Ok(DatasetRun {
        dataset: prep.id.clone(),
        n: prep.data.n(),
        p: prep.data.p(),
        k: prep.k,
        provenance: prep.data.provenance().clone(),
        ensemble_seed: spec.master_seed,
        ensemble_size: spec.total(),
        pools: cal.pool_summaries(),
        reports,
        notes,
        ensemble_calibrated,
        elapsed: start.elapsed(),
    })
}

/// Runs every dataset; a failing dataset is logged and recorded without stopping the others.
pub fn run_benchmark(cfg: &BenchmarkConfig) -> BenchmarkOutcome {
    let results: Vec<Result<DatasetRun>> = (0..cfg.datasets.len())
        .into_par_iter()
        .map(|i| run_dataset(cfg, i))
        .collect();
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for (ds, r) in cfg.datasets.iter().zip(results) {
        match r {
            Ok(run) => runs.push(run),
            Err(e) => {
                warn!("dataset '{}' failed: {e}", ds.id());
                failures.push(DatasetFailure {
                    dataset: ds.id(),
                    error: e.to_string(),
                });
            }
        }
    }
    BenchmarkOutcome { runs, failures }
}
