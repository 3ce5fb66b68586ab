//! Agreement between a clustering and a reference partition: adjusted Rand
//! index, variation of information and BCubed.
//!
//! Tables are oriented with the reference ("truth") partition on the rows
//! and the clustering being assessed on the columns.

use serde::{Deserialize, Serialize};

use crate::data::Partition;
use crate::error::{Error, Result};

/// K₁×K₂ cross-tabulation of two partitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<Vec<u64>>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    n: u64,
}

impl ContingencyTable {
    /// Builds a table from explicit counts; zero margins are allowed.
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let cols = counts.first().map_or(0, Vec::len);
        if counts.is_empty() || cols == 0 || counts.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidDataset(
                "contingency table must be a non-empty rectangle".into(),
            ));
        }
        let row_sums: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
        let col_sums: Vec<u64> = (0..cols).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
        let n = row_sums.iter().sum();
        Ok(ContingencyTable {
            counts,
            row_sums,
            col_sums,
            n,
        })
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    fn cells(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &c)| (i, j, c)))
            .filter(|&(_, _, c)| c > 0)
    }
}

/// `counts[i][j] = |A_i ∩ B_j|`.
pub fn contingency(a: &Partition, b: &Partition) -> Result<ContingencyTable> {
    if a.n() != b.n() {
        return Err(Error::LengthMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    let mut counts = vec![vec![0u64; b.k()]; a.k()];
    for (&i, &j) in a.labels().iter().zip(b.labels()) {
        counts[i][j] += 1;
    }
    ContingencyTable::from_counts(counts)
}

#[inline]
fn pairs(x: u64) -> f64 {
    (x * x.saturating_sub(1) / 2) as f64
}

/// Adjusted Rand index; 1 when the index is degenerate (both partitions a single cluster).
pub fn ari(t: &ContingencyTable) -> Result<f64> {
    if t.n < 2 {
        return Err(Error::InvalidDataset("ARI needs n >= 2".into()));
    }
    let index: f64 = t.cells().map(|(_, _, c)| pairs(c)).sum();
    let sum_a: f64 = t.row_sums.iter().map(|&x| pairs(x)).sum();
    let sum_b: f64 = t.col_sums.iter().map(|&x| pairs(x)).sum();
    let expected = sum_a * sum_b / pairs(t.n);
    let max = 0.5 * (sum_a + sum_b);
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

/// Variation of information in nats.
pub fn vi(t: &ContingencyTable) -> f64 {
    let n = t.n as f64;
    t.cells()
        .map(|(i, j, c)| {
            let c = c as f64;
            -(c / n) * ((c / t.row_sums[i] as f64).ln() + (c / t.col_sums[j] as f64).ln())
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BCubed {
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
}

/// BCubed precision, recall and their harmonic mean.
pub fn bcubed(t: &ContingencyTable) -> BCubed {
    let n = t.n as f64;
    let mut precision = 0.0;
    let mut recall = 0.0;
    for (i, j, c) in t.cells() {
        let sq = (c * c) as f64;
        precision += sq / t.col_sums[j] as f64;
        recall += sq / t.row_sums[i] as f64;
    }
    precision /= n;
    recall /= n;
    BCubed {
        precision,
        recall,
        f: 2.0 * precision * recall / (precision + recall),
    }
}

/// All external indexes of a clustering against a reference partition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExternalScores {
    pub ari: f64,
    pub vi: f64,
    /// Negated VI, so that larger is better like the other columns.
    pub neg_vi: f64,
    pub bcubed_p: f64,
    pub bcubed_r: f64,
    pub bcubed_f: f64,
}

pub fn external_scores(truth: &Partition, clustering: &Partition) -> Result<ExternalScores> {
    let t = contingency(truth, clustering)?;
    let b = bcubed(&t);
    let vi = vi(&t);
    Ok(ExternalScores {
        ari: ari(&t)?,
        vi,
        neg_vi: -vi,
        bcubed_p: b.precision,
        bcubed_r: b.recall,
        bcubed_f: b.f,
    })
}
