//! Baseline clustering methods and ingestion of externally computed partitions.

mod hclust;
mod kmeans;
mod pam;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{read_partition_file, Dataset, DistanceMatrix, Partition};
use crate::error::{Error, Result};

pub use hclust::{cut, hclust, Dendrogram, Linkage, Merge};
pub use kmeans::{kmeans, lloyd_trace, DEFAULT_RESTARTS};
pub use pam::pam;

/// Identifier of a clustering method.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    KMeans,
    Pam,
    Linkage(Linkage),
    /// Partition computed elsewhere and read from a file.
    External(String),
}

impl Method {
    pub const BUILTIN: [Method; 5] = [
        Method::KMeans,
        Method::Pam,
        Method::Linkage(Linkage::Single),
        Method::Linkage(Linkage::Average),
        Method::Linkage(Linkage::Complete),
    ];

    pub fn is_builtin(&self) -> bool {
        !matches!(self, Method::External(_))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::KMeans => f.write_str("kmeans"),
            Method::Pam => f.write_str("pam"),
            Method::Linkage(l) => write!(f, "{l}"),
            Method::External(name) => write!(f, "external:{name}"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kmeans" => Ok(Method::KMeans),
            "pam" => Ok(Method::Pam),
            "single" => Ok(Method::Linkage(Linkage::Single)),
            "average" => Ok(Method::Linkage(Linkage::Average)),
            "complete" => Ok(Method::Linkage(Linkage::Complete)),
            _ => match s.strip_prefix("external:") {
                Some(name) if !name.is_empty() => Ok(Method::External(name.to_string())),
                _ => Err(Error::Config(format!("unknown method '{s}'"))),
            },
        }
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A partition produced by one clustering method.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult {
    pub partition: Partition,
    pub method: Method,
    /// k-means within-cluster sum of squares or PAM total distance to medoids.
    pub objective: Option<f64>,
    pub seed_used: u64,
}

pub(crate) fn check_k(k: usize, n: usize) -> Result<()> {
    if k < 1 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    Ok(())
}

/// Runs a built-in method with `k` clusters.
pub fn run_builtin(
    method: &Method,
    data: &Dataset,
    dm: &DistanceMatrix,
    k: usize,
    kmeans_restarts: usize,
    seed: u64,
) -> Result<ClusteringResult> {
    match method {
        Method::KMeans => kmeans(data, k, kmeans_restarts, seed),
        Method::Pam => pam(dm, k, seed),
        Method::Linkage(linkage) => {
            check_k(k, dm.n())?;
            let dendrogram = hclust(dm, *linkage)?;
            Ok(ClusteringResult {
                partition: cut(&dendrogram, k)?,
                method: method.clone(),
                objective: None,
                seed_used: seed,
            })
        }
        Method::External(name) => Err(Error::Config(format!(
            "external method '{name}' must be ingested from a file"
        ))),
    }
}

/// Reads an externally computed partition of `n` observations.
///
/// The method is named `external:<name>`, with `name` defaulting to the file stem.
pub fn ingest_partition(path: impl AsRef<Path>, n: usize, name: Option<&str>) -> Result<ClusteringResult> {
    let path = path.as_ref();
    let partition = read_partition_file(path, Some(n))?;
    let name = match name {
        Some(name) => name.to_string(),
        None => path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "partition".into()),
    };
    Ok(ClusteringResult {
        partition,
        method: Method::External(name),
        objective: None,
        seed_used: 0,
    })
}
