//! Lloyd's k-means with random restarts.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{check_k, ClusteringResult, Method};
use crate::data::{Dataset, Partition};
use crate::error::Result;

pub const DEFAULT_RESTARTS: usize = 10;
const MAX_ITER: usize = 100;

struct Run {
    labels: Vec<usize>,
    objective: f64,
    history: Vec<f64>,
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(x: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = sq_dist(x, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn means(d: &Dataset, labels: &[usize], k: usize) -> Vec<Vec<f64>> {
    let mut sums = vec![vec![0.0; d.p()]; k];
    let mut counts = vec![0usize; k];
    for (i, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        for (s, x) in sums[l].iter_mut().zip(d.row(i)) {
            *s += x;
        }
    }
    for (s, &c) in sums.iter_mut().zip(&counts) {
        s.iter_mut().for_each(|v| *v /= c as f64);
    }
    sums
}

fn wcss(d: &Dataset, labels: &[usize], centers: &[Vec<f64>]) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| sq_dist(d.row(i), &centers[l]))
        .sum()
}

fn lloyd(d: &Dataset, k: usize, seed: u64) -> Run {
    let n = d.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers: Vec<Vec<f64>> = sample(&mut rng, n, k).into_iter().map(|i| d.row(i).to_vec()).collect();

    let mut labels = vec![usize::MAX; n];
    let mut cost = vec![0.0; n];
    let mut history = Vec::new();
    for _ in 0..MAX_ITER {
        let mut next = vec![0usize; n];
        let mut sizes = vec![0usize; k];
        for i in 0..n {
            let (c, dist) = nearest(d.row(i), &centers);
            next[i] = c;
            cost[i] = dist;
            sizes[c] += 1;
        }
        // empty cluster: the point farthest from its center becomes a singleton center
        for empty in 0..k {
            if sizes[empty] > 0 {
                continue;
            }
            let mut far: Option<usize> = None;
            for i in 0..n {
                if sizes[next[i]] > 1 && far.is_none_or(|f| cost[i] > cost[f]) {
                    far = Some(i);
                }
            }
            let i = far.expect("k <= n leaves a donor cluster");
            sizes[next[i]] -= 1;
            next[i] = empty;
            sizes[empty] = 1;
            cost[i] = 0.0;
            centers[empty] = d.row(i).to_vec();
        }
        let unchanged = next == labels;
        labels = next;
        if unchanged {
            break;
        }
        centers = means(d, &labels, k);
        history.push(wcss(d, &labels, &centers));
    }
    let centers = means(d, &labels, k);
    let objective = wcss(d, &labels, &centers);
    Run {
        labels,
        objective,
        history,
    }
}

/// Best of `restarts` Lloyd runs by within-cluster sum of squares.
///
/// Restart `r` is seeded with `seed + r` and starts from `k` distinct
/// observations drawn uniformly. Ties in the objective go to the lowest
/// restart index.
pub fn kmeans(d: &Dataset, k: usize, restarts: usize, seed: u64) -> Result<ClusteringResult> {
    check_k(k, d.n())?;
    let restarts = restarts.max(1);
    let runs: Vec<Run> = (0..restarts as u64)
        .into_par_iter()
        .map(|r| lloyd(d, k, seed.wrapping_add(r)))
        .collect();
    let mut best = 0;
    for (r, run) in runs.iter().enumerate() {
        if run.objective < runs[best].objective {
            best = r;
        }
    }
    let run = &runs[best];
    Ok(ClusteringResult {
        partition: Partition::from_labels(&run.labels)?,
        method: Method::KMeans,
        objective: Some(run.objective),
        seed_used: seed,
    })
}

/// Objective after each mean update of a single Lloyd run, followed by the final objective.
pub fn lloyd_trace(d: &Dataset, k: usize, seed: u64) -> Result<Vec<f64>> {
    check_k(k, d.n())?;
    let run = lloyd(d, k, seed);
    let mut trace = run.history;
    trace.push(run.objective);
    Ok(trace)
}
