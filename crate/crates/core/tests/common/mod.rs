#![allow(dead_code)]

use clustbench::data::{euclidean_distances, Dataset, DistanceMatrix, Partition};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dm1d(points: &[f64]) -> DistanceMatrix {
    euclidean_distances(&Dataset::from_1d(points).unwrap()).unwrap()
}

pub fn labels(raw: &[usize]) -> Partition {
    Partition::from_labels(raw).unwrap()
}

/// Spherical Gaussian blobs of unit sd around the given centers, `per` points each,
/// returned with their blob labels.
pub fn blobs(centers: &[Vec<f64>], per: usize, seed: u64) -> (Dataset, Vec<usize>) {
    let mut r = rng(seed);
    let mut rows = Vec::new();
    let mut truth = Vec::new();
    for (b, c) in centers.iter().enumerate() {
        for _ in 0..per {
            rows.push(c.iter().map(|&m| m + r.sample::<f64, _>(StandardNormal)).collect());
            truth.push(b);
        }
    }
    (Dataset::from_rows(rows).unwrap(), truth)
}

/// n×p standard normal sample.
pub fn gaussian(n: usize, p: usize, seed: u64) -> Dataset {
    let mut r = rng(seed);
    let rows = (0..n)
        .map(|_| (0..p).map(|_| r.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    Dataset::from_rows(rows).unwrap()
}

/// Uniform labels in 0..k, re-drawn until every label occurs.
pub fn random_labels(r: &mut impl Rng, n: usize, k: usize) -> Vec<usize> {
    assert!(k <= n);
    loop {
        let l: Vec<usize> = (0..n).map(|_| r.gen_range(0..k)).collect();
        if (0..k).all(|c| l.contains(&c)) {
            return l;
        }
    }
}

/// Writes a CSV with header `x1..xp` plus an optional leading `class` column.
pub fn write_csv(path: &std::path::Path, d: &Dataset, truth: Option<&[usize]>) {
    let mut out = String::new();
    let names: Vec<String> = (1..=d.p()).map(|j| format!("x{j}")).collect();
    if truth.is_some() {
        out.push_str("class,");
    }
    out.push_str(&names.join(","));
    out.push('\n');
    for i in 0..d.n() {
        if let Some(t) = truth {
            out.push_str(&format!("c{},", t[i] + 1));
        }
        let cells: Vec<String> = d.row(i).iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).unwrap();
}
