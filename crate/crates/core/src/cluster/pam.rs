//! Partitioning Around Medoids: greedy BUILD followed by steepest-descent SWAP.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{check_k, ClusteringResult, Method};
use crate::data::{DistanceMatrix, Partition};
use crate::error::Result;

/// Nearest and second-nearest medoid per observation.
struct Assignment {
    nearest: Vec<usize>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

fn assign(dm: &DistanceMatrix, medoids: &[usize]) -> Assignment {
    let n = dm.n();
    let mut nearest = vec![0; n];
    let mut d1 = vec![f64::INFINITY; n];
    let mut d2 = vec![f64::INFINITY; n];
    for j in 0..n {
        // a medoid always belongs to its own cluster, even among duplicates
        let own = medoids.iter().position(|&m| m == j);
        for (slot, &m) in medoids.iter().enumerate() {
            let d = dm.get(j, m);
            let first = match own {
                Some(s) => slot == s,
                None => d < d1[j],
            };
            if first {
                d2[j] = d1[j].min(d2[j]);
                d1[j] = d;
                nearest[j] = slot;
            } else if d < d2[j] {
                d2[j] = d;
            }
        }
    }
    Assignment { nearest, d1, d2 }
}

/// PAM on unsquared distances.
///
/// The seed only breaks exact ties between candidate medoids, through a
/// seeded random priority over observations.
pub fn pam(dm: &DistanceMatrix, k: usize, seed: u64) -> Result<ClusteringResult> {
    let n = dm.n();
    check_k(k, n)?;
    let mut rank: Vec<usize> = (0..n).collect();
    rank.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    // priority[i] = position of i in the shuffled order
    let mut priority = vec![0; n];
    for (pos, &i) in rank.iter().enumerate() {
        priority[i] = pos;
    }

    let medoids = build(dm, k, &priority);
    let medoids = swap(dm, medoids, &priority);

    let a = assign(dm, &medoids);
    let objective = a.d1.iter().sum();
    Ok(ClusteringResult {
        partition: Partition::from_labels(&a.nearest)?,
        method: Method::Pam,
        objective: Some(objective),
        seed_used: seed,
    })
}

fn build(dm: &DistanceMatrix, k: usize, priority: &[usize]) -> Vec<usize> {
    let n = dm.n();
    let better = |score: f64, i: usize, best: Option<(f64, usize)>| match best {
        None => true,
        Some((s, b)) => score < s || (score == s && priority[i] < priority[b]),
    };

    let mut best: Option<(f64, usize)> = None;
    for i in 0..n {
        let total: f64 = (0..n).map(|j| dm.get(i, j)).sum();
        if better(total, i, best) {
            best = Some((total, i));
        }
    }
    let first = best.expect("n >= 1").1;
    let mut medoids = vec![first];
    let mut is_medoid = vec![false; n];
    is_medoid[first] = true;
    let mut dnear: Vec<f64> = (0..n).map(|j| dm.get(first, j)).collect();

    while medoids.len() < k {
        let mut best: Option<(f64, usize)> = None;
        for c in (0..n).filter(|&c| !is_medoid[c]) {
            // maximize the gain, i.e. minimize its negation
            let gain: f64 = (0..n).map(|j| (dnear[j] - dm.get(c, j)).max(0.0)).sum();
            if better(-gain, c, best) {
                best = Some((-gain, c));
            }
        }
        let c = best.expect("k <= n").1;
        medoids.push(c);
        is_medoid[c] = true;
        for (j, dn) in dnear.iter_mut().enumerate() {
            *dn = dn.min(dm.get(c, j));
        }
    }
    medoids
}

/// Total-cost change of replacing each medoid slot by candidate `o`.
fn swap_deltas(dm: &DistanceMatrix, a: &Assignment, k: usize, o: usize) -> Vec<f64> {
    let mut common = 0.0;
    let mut own = vec![0.0; k];
    for j in 0..dm.n() {
        let doj = dm.get(o, j);
        let gain = (doj - a.d1[j]).min(0.0);
        common += gain;
        // when j's own medoid leaves, j goes to o or to its second-nearest medoid
        own[a.nearest[j]] += doj.min(a.d2[j]) - a.d1[j] - gain;
    }
    own.into_iter().map(|v| v + common).collect()
}

fn swap(dm: &DistanceMatrix, mut medoids: Vec<usize>, priority: &[usize]) -> Vec<usize> {
    let n = dm.n();
    let k = medoids.len();
    if k == n {
        return medoids;
    }
    loop {
        let a = assign(dm, &medoids);
        let total: f64 = a.d1.iter().sum();
        let mut is_medoid = vec![false; n];
        medoids.iter().for_each(|&m| is_medoid[m] = true);

        let candidates: Vec<usize> = (0..n).filter(|&o| !is_medoid[o]).collect();
        let deltas: Vec<Vec<f64>> = candidates.par_iter().map(|&o| swap_deltas(dm, &a, k, o)).collect();

        // best = (delta, candidate, slot), scanned in a fixed order
        let mut best: Option<(f64, usize, usize)> = None;
        for (&o, row) in candidates.iter().zip(&deltas) {
            for (slot, &delta) in row.iter().enumerate() {
                let take = match best {
                    None => true,
                    Some((bd, bo, bs)) => {
                        delta < bd
                            || (delta == bd
                                && (priority[o] < priority[bo]
                                    || (o == bo && priority[medoids[slot]] < priority[medoids[bs]])))
                    }
                };
                if take {
                    best = Some((delta, o, slot));
                }
            }
        }
        match best {
            // accept only strict decreases beyond rounding noise
            Some((delta, o, slot)) if delta < -1e-12 * total.max(f64::MIN_POSITIVE) => {
                medoids[slot] = o;
            }
            _ => return medoids,
        }
    }
}
