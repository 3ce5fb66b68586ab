//! Separation and distance-structure indexes: separation index, Pearson
//! version of Hubert's gamma and the average silhouette width.

use super::IndexName;
use crate::data::{DistanceMatrix, Partition};
use crate::error::{Error, Result};

fn require_two_clusters(index: IndexName, c: &Partition) -> Result<()> {
    if c.k() < 2 {
        return Err(Error::undefined(index, format!("needs K >= 2, got K={}", c.k())));
    }
    Ok(())
}

/// Separation index and minimum separation.
///
/// Every observation contributes its distance to the closest observation in
/// another cluster. Within each cluster the `max(1, ⌊p·n_k⌋)` smallest of
/// these are averaged together across clusters; the minimum separation is the
/// smallest of all of them.
pub fn sindex(dm: &DistanceMatrix, c: &Partition, p: f64) -> Result<(f64, f64)> {
    require_two_clusters(IndexName::SIndex, c)?;
    let n = dm.n();
    let mut border = vec![f64::INFINITY; n];
    for i in 0..n {
        for j in i + 1..n {
            if c.label(i) != c.label(j) {
                let d = dm.get(i, j);
                border[i] = border[i].min(d);
                border[j] = border[j].min(d);
            }
        }
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for members in c.members() {
        let mut values: Vec<f64> = members.iter().map(|&i| border[i]).collect();
        values.sort_by(f64::total_cmp);
        let m = ((p * members.len() as f64).floor() as usize).clamp(1, members.len());
        sum += values[..m].iter().sum::<f64>();
        count += m;
    }
    let min_sep = border.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((sum / count as f64, min_sep))
}

/// Pearson correlation between distances and the "different cluster" indicator.
pub fn pearsongamma(dm: &DistanceMatrix, c: &Partition) -> Result<f64> {
    require_two_clusters(IndexName::PearsonGamma, c)?;
    let count = dm.entries().len() as f64;
    let mut sum_d = 0.0;
    let mut sum_c = 0.0;
    for (i, j, d) in dm.pairs() {
        sum_d += d;
        if c.label(i) != c.label(j) {
            sum_c += 1.0;
        }
    }
    let (mean_d, mean_c) = (sum_d / count, sum_c / count);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (i, j, d) in dm.pairs() {
        let x = d - mean_d;
        let y = if c.label(i) != c.label(j) { 1.0 } else { 0.0 } - mean_c;
        sxy += x * y;
        sxx += x * x;
        syy += y * y;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::undefined(
            IndexName::PearsonGamma,
            "distances or cluster indicator have zero variance",
        ));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Per-observation silhouette widths; 0 for members of singleton clusters.
pub fn silhouettes(dm: &DistanceMatrix, c: &Partition) -> Result<Vec<f64>> {
    require_two_clusters(IndexName::Asw, c)?;
    let n = dm.n();
    let k = c.k();
    let sizes = c.sizes();
    let mut sums = vec![0.0; k];
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        sums.iter_mut().for_each(|s| *s = 0.0);
        for j in 0..n {
            if j != i {
                sums[c.label(j)] += dm.get(i, j);
            }
        }
        let own = c.label(i);
        if sizes[own] == 1 {
            out.push(0.0);
            continue;
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&h| h != own)
            .map(|h| sums[h] / sizes[h] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        out.push(if denom > 0.0 { (b - a) / denom } else { 0.0 });
    }
    Ok(out)
}

/// Average silhouette width.
pub fn asw(dm: &DistanceMatrix, c: &Partition) -> Result<f64> {
    let s = silhouettes(dm, c)?;
    Ok(s.iter().sum::<f64>() / s.len() as f64)
}
