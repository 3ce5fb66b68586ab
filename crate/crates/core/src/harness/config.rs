//! Benchmark configuration, read from TOML.
//!
//! ```toml
//! master_seed = 1
//! methods = ["kmeans", "pam", "single", "average", "complete", "external:mclust"]
//! output_dir = "results"          # optional; the CLI --out flag takes precedence
//!
//! [ensemble]
//! per_algorithm = 50              # random clusterings per generator (4 generators)
//! seed = 7                        # optional; derived from master_seed when absent
//!
//! [index_params]
//! sindex_p = 0.1
//! kernel_p = 0.1
//! cvnnd_k = 2
//!
//! [kmeans]
//! restarts = 10
//!
//! [[datasets]]
//! path = "data/iris.csv"          # relative to the config file
//! id = "iris"                     # optional; defaults to the file stem
//! truth_column = 0                # zero-based position or header name; optional
//! scale = "zscore"                # or "none"
//! k = 3                           # optional when a truth column is given
//! external = { mclust = "partitions/iris_mclust.txt" }
//! ```
//!
//! Missing cells are mean-imputed before scaling.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cluster::{Method, DEFAULT_RESTARTS};
use crate::data::TruthColumn;
use crate::ensemble::{derive_seed, EnsembleSpec};
use crate::error::{Error, Result};
use crate::indexes::IndexParams;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scaling {
    #[default]
    Zscore,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth_column: Option<TruthColumn>,
    #[serde(default)]
    pub scale: Scaling,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Externally computed partitions of this dataset, by method name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub external: BTreeMap<String, PathBuf>,
}

impl DatasetConfig {
    pub fn id(&self) -> String {
        self.id.clone().unwrap_or_else(|| {
            self.path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".into())
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleConfig {
    pub per_algorithm: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            per_algorithm: EnsembleSpec::DEFAULT_PER_ALGORITHM,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KMeansConfig {
    pub restarts: usize,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        KMeansConfig {
            restarts: DEFAULT_RESTARTS,
        }
    }
}

fn default_methods() -> Vec<Method> {
    Method::BUILTIN.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub datasets: Vec<DatasetConfig>,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub ensemble: EnsembleConfig,
    #[serde(default)]
    pub index_params: IndexParams,
    #[serde(default)]
    pub kmeans: KMeansConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub master_seed: u64,
}

// stream tags for derived seeds
const TAG_ENSEMBLE: u64 = 1;
const TAG_METHOD: u64 = 2;

impl BenchmarkConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: BenchmarkConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative dataset and partition paths are resolved
    /// against the file's directory.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let Some(base) = path.parent() {
            cfg.resolve_paths(base);
        }
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for ds in &mut self.datasets {
            fix(&mut ds.path);
            ds.external.values_mut().for_each(fix);
        }
        if let Some(out) = &mut self.output_dir {
            fix(out);
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.datasets.is_empty() {
            return fail("no datasets configured".into());
        }
        if self.methods.is_empty() {
            return fail("method list is empty".into());
        }
        let mut seen = HashSet::new();
        for m in &self.methods {
            if !seen.insert(m) {
                return fail(format!("method '{m}' listed twice"));
            }
        }
        if self.ensemble.per_algorithm < 1 {
            return fail("ensemble.per_algorithm must be >= 1".into());
        }
        let p = &self.index_params;
        if !(p.sindex_p > 0.0 && p.sindex_p <= 1.0) {
            return fail(format!("index_params.sindex_p must be in (0, 1], got {}", p.sindex_p));
        }
        if !(p.kernel_p > 0.0 && p.kernel_p <= 1.0) {
            return fail(format!("index_params.kernel_p must be in (0, 1], got {}", p.kernel_p));
        }
        if p.cvnnd_k < 1 {
            return fail("index_params.cvnnd_k must be >= 1".into());
        }
        if self.kmeans.restarts < 1 {
            return fail("kmeans.restarts must be >= 1".into());
        }
        let mut ids = HashSet::new();
        for ds in &self.datasets {
            let id = ds.id();
            if !ids.insert(id.clone()) {
                return fail(format!("duplicate dataset id '{id}'"));
            }
            if ds.k.is_none() && ds.truth_column.is_none() {
                return fail(format!("dataset '{id}': give k or a truth_column"));
            }
            if ds.k == Some(0) {
                return fail(format!("dataset '{id}': k must be >= 1"));
            }
            for m in &self.methods {
                if let Method::External(name) = m {
                    if !ds.external.contains_key(name) {
                        return fail(format!("dataset '{id}' has no partition file for method '{m}'"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn ensemble_seed(&self) -> u64 {
        self.ensemble
            .seed
            .unwrap_or_else(|| derive_seed(self.master_seed, &[TAG_ENSEMBLE]))
    }

    pub(crate) fn ensemble_spec(&self, dataset_index: usize, k: usize) -> EnsembleSpec {
        EnsembleSpec {
            per_algorithm: self.ensemble.per_algorithm,
            k,
            master_seed: derive_seed(self.ensemble_seed(), &[dataset_index as u64]),
        }
    }

    pub(crate) fn method_seed(&self, dataset_index: usize, method_index: usize) -> u64 {
        derive_seed(
            self.master_seed,
            &[TAG_METHOD, dataset_index as u64, method_index as u64],
        )
    }
}
