//! Random clusterings used as the calibration reference.
//!
//! Four generators each start from K observations drawn uniformly without
//! replacement. Random K-centroids assigns every observation to its nearest
//! drawn centroid; the other three grow the K clusters one observation at a
//! time, always attaching the unclustered observation with the smallest score:
//!
//! * nearest neighbour: distance to the closest clustered observation;
//! * farthest neighbour: over clusters, the smallest distance to the farthest member;
//! * average distances: over clusters, the smallest mean distance to the members.
//!
//! Clusters are numbered in ascending order of their starting observation.
//! Ties go to the lowest observation index, then to the lowest cluster number.
//!
//! All randomness comes from ChaCha8 streams seeded with [`derive_seed`], so
//! ensembles are reproducible across platforms and thread counts.

use std::fmt;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{DistanceMatrix, Partition};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomAlgorithm {
    KCentroids,
    NearestNeighbour,
    FarthestNeighbour,
    AverageDistances,
}

impl RandomAlgorithm {
    pub const ALL: [RandomAlgorithm; 4] = [
        RandomAlgorithm::KCentroids,
        RandomAlgorithm::NearestNeighbour,
        RandomAlgorithm::FarthestNeighbour,
        RandomAlgorithm::AverageDistances,
    ];

    pub fn run(self, dm: &DistanceMatrix, k: usize, seed: u64) -> Result<Partition> {
        match self {
            RandomAlgorithm::KCentroids => rand_kcentroids(dm, k, seed),
            RandomAlgorithm::NearestNeighbour => rand_nearest_neighbour(dm, k, seed),
            RandomAlgorithm::FarthestNeighbour => rand_farthest_neighbour(dm, k, seed),
            RandomAlgorithm::AverageDistances => rand_average_distances(dm, k, seed),
        }
    }
}

impl fmt::Display for RandomAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RandomAlgorithm::KCentroids => "random_kcentroids",
            RandomAlgorithm::NearestNeighbour => "random_nearest",
            RandomAlgorithm::FarthestNeighbour => "random_farthest",
            RandomAlgorithm::AverageDistances => "random_average",
        })
    }
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable seed for a sub-stream identified by `parts` under `master`.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(master), |h, &p| splitmix64(h ^ splitmix64(p)))
}

fn draw_seeds(n: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 1 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seeds = sample(&mut rng, n, k).into_vec();
    seeds.sort_unstable();
    Ok(seeds)
}

pub fn rand_kcentroids(dm: &DistanceMatrix, k: usize, seed: u64) -> Result<Partition> {
    let centroids = draw_seeds(dm.n(), k, seed)?;
    let labels: Vec<usize> = (0..dm.n())
        .map(|i| {
            if let Some(c) = centroids.iter().position(|&m| m == i) {
                return c;
            }
            let mut best = 0;
            for (c, &m) in centroids.iter().enumerate().skip(1) {
                if dm.get(i, m) < dm.get(i, centroids[best]) {
                    best = c;
                }
            }
            best
        })
        .collect();
    Partition::from_labels(&labels)
}

const UNASSIGNED: usize = usize::MAX;

fn start(dm: &DistanceMatrix, k: usize, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    let seeds = draw_seeds(dm.n(), k, seed)?;
    let mut labels = vec![UNASSIGNED; dm.n()];
    for (c, &s) in seeds.iter().enumerate() {
        labels[s] = c;
    }
    Ok((seeds, labels))
}

/// Unclustered observation with the smallest score; ties to the lowest index.
fn next_point(labels: &[usize], score: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (z, &s) in score.iter().enumerate() {
        if labels[z] == UNASSIGNED && best.is_none_or(|b| s < score[b]) {
            best = Some(z);
        }
    }
    best
}

pub fn rand_nearest_neighbour(dm: &DistanceMatrix, k: usize, seed: u64) -> Result<Partition> {
    let n = dm.n();
    let (seeds, mut labels) = start(dm, k, seed)?;
    // closest clustered observation and its distance
    let mut near = vec![UNASSIGNED; n];
    let mut score = vec![f64::INFINITY; n];
    for z in (0..n).filter(|&z| labels[z] == UNASSIGNED) {
        for &s in &seeds {
            let d = dm.get(z, s);
            if d < score[z] {
                score[z] = d;
                near[z] = s;
            }
        }
    }
    while let Some(x) = next_point(&labels, &score) {
        labels[x] = labels[near[x]];
        for z in (0..n).filter(|&z| labels[z] == UNASSIGNED) {
            let d = dm.get(z, x);
            if d < score[z] || (d == score[z] && x < near[z]) {
                score[z] = d;
                near[z] = x;
            }
        }
    }
    Partition::from_labels(&labels)
}

/// Shared driver for the farthest-neighbour and average-distance generators.
///
/// `link[z * k + c]` holds the running link statistic of unclustered `z` to
/// cluster `c`: the maximum distance, or the distance sum for averages.
fn grow_by_cluster_link(dm: &DistanceMatrix, k: usize, seed: u64, average: bool) -> Result<Partition> {
    let n = dm.n();
    let (seeds, mut labels) = start(dm, k, seed)?;
    let mut counts = vec![1usize; k];
    let mut link = vec![0.0; n * k];
    let mut score = vec![f64::INFINITY; n];
    let mut target = vec![0usize; n];

    let value = |link: &[f64], counts: &[usize], z: usize, c: usize| {
        if average {
            link[z * k + c] / counts[c] as f64
        } else {
            link[z * k + c]
        }
    };
    let rescore = |link: &[f64], counts: &[usize], z: usize| {
        let mut best = (0, value(link, counts, z, 0));
        for c in 1..k {
            let v = value(link, counts, z, c);
            if v < best.1 {
                best = (c, v);
            }
        }
        best
    };

    for z in (0..n).filter(|&z| labels[z] == UNASSIGNED) {
        for (c, &s) in seeds.iter().enumerate() {
            link[z * k + c] = dm.get(z, s);
        }
        (target[z], score[z]) = rescore(&link, &counts, z);
    }
    while let Some(x) = next_point(&labels, &score) {
        let c = target[x];
        labels[x] = c;
        counts[c] += 1;
        for z in (0..n).filter(|&z| labels[z] == UNASSIGNED) {
            let d = dm.get(z, x);
            let slot = &mut link[z * k + c];
            if average {
                *slot += d;
            } else {
                *slot = slot.max(d);
            }
            if target[z] == c {
                (target[z], score[z]) = rescore(&link, &counts, z);
            } else {
                let v = value(&link, &counts, z, c);
                if v < score[z] || (v == score[z] && c < target[z]) {
                    (target[z], score[z]) = (c, v);
                }
            }
        }
    }
    Partition::from_labels(&labels)
}

pub fn rand_farthest_neighbour(dm: &DistanceMatrix, k: usize, seed: u64) -> Result<Partition> {
    grow_by_cluster_link(dm, k, seed, false)
}

pub fn rand_average_distances(dm: &DistanceMatrix, k: usize, seed: u64) -> Result<Partition> {
    grow_by_cluster_link(dm, k, seed, true)
}

/// Size and seeding of a random-clustering ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub per_algorithm: usize,
    pub k: usize,
    pub master_seed: u64,
}

impl EnsembleSpec {
    pub const DEFAULT_PER_ALGORITHM: usize = 50;

    pub fn total(&self) -> usize {
        RandomAlgorithm::ALL.len() * self.per_algorithm
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleMember {
    pub algorithm: RandomAlgorithm,
    pub replicate: usize,
    pub seed: u64,
    pub partition: Partition,
}

/// All random clusterings of `spec`, algorithm-major and replicate-minor.
pub fn generate_ensemble(dm: &DistanceMatrix, spec: &EnsembleSpec) -> Result<Vec<EnsembleMember>> {
    if spec.per_algorithm < 1 {
        return Err(Error::Config("ensemble.per_algorithm must be >= 1".into()));
    }
    let jobs: Vec<(usize, RandomAlgorithm, usize)> = RandomAlgorithm::ALL
        .iter()
        .enumerate()
        .flat_map(|(a, &alg)| (0..spec.per_algorithm).map(move |r| (a, alg, r)))
        .collect();
    jobs.into_par_iter()
        .map(|(a, algorithm, replicate)| {
            let seed = derive_seed(spec.master_seed, &[a as u64, replicate as u64]);
            Ok(EnsembleMember {
                algorithm,
                replicate,
                seed,
                partition: algorithm.run(dm, spec.k, seed)?,
            })
        })
        .collect()
}
