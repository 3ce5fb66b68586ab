//! Agglomerative clustering with single, average and complete linkage.
//!
//! Uses Lance–Williams updates on a working copy of the condensed matrix and
//! a per-row nearest-neighbour cache. Each active cluster lives in the slot
//! of its smallest member, and at every step the pair with the smallest
//! distance is merged, ties going to the lexicographically smallest slot pair.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data::{DistanceMatrix, Partition};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    Single,
    Average,
    Complete,
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Linkage::Single => "single",
            Linkage::Average => "average",
            Linkage::Complete => "complete",
        })
    }
}

/// One merge step. Nodes `0..n` are leaves; the merge at step `s` creates node `n + s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub leaves: usize,
    pub merges: Vec<Merge>,
    pub linkage: Linkage,
}

struct Working {
    n: usize,
    d: Vec<f64>,
}

impl Working {
    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.d[self.idx(i, j)]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.d[k] = v;
    }
}

const NONE: usize = usize::MAX;

/// Nearest active slot above `i`; ties to the smallest slot.
fn row_min(w: &Working, active: &[bool], i: usize) -> (usize, f64) {
    let mut best = (NONE, f64::INFINITY);
    for j in i + 1..w.n {
        if active[j] {
            let d = w.get(i, j);
            if d < best.1 || best.0 == NONE {
                best = (j, d);
            }
        }
    }
    best
}

pub fn hclust(dm: &DistanceMatrix, linkage: Linkage) -> Result<Dendrogram> {
    let n = dm.n();
    if n < 2 {
        return Err(Error::InvalidDataset("hierarchical clustering needs n >= 2".into()));
    }
    let mut w = Working {
        n,
        d: dm.entries().to_vec(),
    };
    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    let mut node: Vec<usize> = (0..n).collect();
    let mut nn: Vec<(usize, f64)> = (0..n).map(|i| row_min(&w, &active, i)).collect();
    let mut merges = Vec::with_capacity(n - 1);

    for step in 0..n - 1 {
        let mut i = NONE;
        for s in 0..n {
            if active[s] && nn[s].0 != NONE && (i == NONE || nn[s].1 < nn[i].1) {
                i = s;
            }
        }
        let (j, height) = nn[i];

        let (ni, nj) = (size[i] as f64, size[j] as f64);
        for k in (0..n).filter(|&k| active[k] && k != i && k != j) {
            let (dki, dkj) = (w.get(k, i), w.get(k, j));
            let v = match linkage {
                Linkage::Single => dki.min(dkj),
                Linkage::Complete => dki.max(dkj),
                Linkage::Average => (ni * dki + nj * dkj) / (ni + nj),
            };
            w.set(k, i, v);
        }
        active[j] = false;
        size[i] += size[j];
        merges.push(Merge {
            left: node[i].min(node[j]),
            right: node[i].max(node[j]),
            height,
            size: size[i],
        });
        node[i] = n + step;

        nn[i] = row_min(&w, &active, i);
        nn[j] = (NONE, f64::INFINITY);
        for k in 0..n {
            if !active[k] || k == i {
                continue;
            }
            if nn[k].0 == i || nn[k].0 == j {
                nn[k] = row_min(&w, &active, k);
            } else if k < i {
                let d = w.get(k, i);
                if d < nn[k].1 || (d == nn[k].1 && i < nn[k].0) {
                    nn[k] = (i, d);
                }
            }
        }
    }
    Ok(Dendrogram {
        leaves: n,
        merges,
        linkage,
    })
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Undoes the last `k − 1` merges and returns the resulting `k` groups.
pub fn cut(dg: &Dendrogram, k: usize) -> Result<Partition> {
    let n = dg.leaves;
    if k < 1 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let mut parent: Vec<usize> = (0..n).collect();
    // representative leaf of every node
    let mut rep: Vec<usize> = (0..n).collect();
    for m in &dg.merges[..n - k] {
        let (a, b) = (find(&mut parent, rep[m.left]), find(&mut parent, rep[m.right]));
        parent[b] = a;
        rep.push(a);
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    Partition::from_labels(&roots)
}
