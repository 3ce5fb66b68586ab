//! Cluster-size balance and within-cluster distributional shape.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{chi_squared_cdf, IndexName};
use crate::data::{Dataset, DistanceMatrix, Partition};
use crate::error::{Error, Result};

/// Entropy of the cluster-size distribution, natural log.
pub fn entropy(c: &Partition) -> f64 {
    let n = c.n() as f64;
    -c.sizes()
        .iter()
        .map(|&s| {
            let f = s as f64 / n;
            f * f.ln()
        })
        .sum::<f64>()
}

const MAX_CONDITION: f64 = 1e12;
const RIDGE: f64 = 1e-8;

/// Squared Mahalanobis distances of cluster members to their cluster mean.
fn mahalanobis_sq(d: &Dataset, members: &[usize]) -> Vec<f64> {
    let p = d.p();
    let m = members.len() as f64;
    let mut mean = DVector::<f64>::zeros(p);
    for &i in members {
        mean += DVector::from_column_slice(d.row(i));
    }
    mean /= m;
    let centered: Vec<DVector<f64>> = members
        .iter()
        .map(|&i| DVector::from_column_slice(d.row(i)) - &mean)
        .collect();
    let mut cov = DMatrix::<f64>::zeros(p, p);
    for x in &centered {
        cov.ger(1.0, x, x, 1.0);
    }
    cov /= m - 1.0;

    let eig = SymmetricEigen::new(cov.clone()).eigenvalues;
    let (lo, hi) = eig
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !(lo > 0.0) || hi / lo > MAX_CONDITION {
        let ridge = RIDGE * cov.trace() / p as f64;
        for j in 0..p {
            cov[(j, j)] += ridge;
        }
    }
    match cov.clone().cholesky() {
        Some(chol) => centered.iter().map(|x| x.dot(&chol.solve(x))).collect(),
        // a zero-trace cluster (all points equal) has every distance zero
        None => vec![0.0; members.len()],
    }
}

/// Kolmogorov distance between the pooled within-cluster squared Mahalanobis
/// distances and the chi-squared distribution with p degrees of freedom.
///
/// Clusters with at most p+1 members have no usable covariance and are left out.
pub fn kdnorm(d: &Dataset, c: &Partition) -> Result<f64> {
    let p = d.p();
    let mut pooled: Vec<f64> = c
        .members()
        .iter()
        .filter(|m| m.len() >= p + 2)
        .flat_map(|m| mahalanobis_sq(d, m))
        .collect();
    if pooled.is_empty() {
        return Err(Error::undefined(
            IndexName::KdNorm,
            format!("every cluster has at most p+1 = {} members", p + 1),
        ));
    }
    pooled.sort_by(f64::total_cmp);
    let n = pooled.len() as f64;
    let mut sup = 0.0f64;
    for (i, &t) in pooled.iter().enumerate() {
        let f = chi_squared_cdf(t, p as f64);
        sup = sup.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(sup.clamp(0.0, 1.0))
}

/// Coefficient of variation of the distance to the k-th nearest
/// within-cluster neighbour, averaged over clusters with more than k
/// members with weights n_j.
pub fn cvnnd(dm: &DistanceMatrix, c: &Partition, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Config("cvnnd neighbour order must be >= 1".into()));
    }
    let mut weighted = 0.0;
    let mut weight = 0usize;
    for members in c.members() {
        let nj = members.len();
        if nj <= k {
            continue;
        }
        let kth: Vec<f64> = members
            .iter()
            .map(|&i| {
                let mut ds: Vec<f64> = members.iter().filter(|&&j| j != i).map(|&j| dm.get(i, j)).collect();
                *ds.select_nth_unstable_by(k - 1, f64::total_cmp).1
            })
            .collect();
        let mean = kth.iter().sum::<f64>() / nj as f64;
        let var = kth.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nj - 1) as f64;
        let cv = if mean > 0.0 { var.sqrt() / mean } else { 0.0 };
        weighted += nj as f64 * cv;
        weight += nj;
    }
    if weight == 0 {
        return Err(Error::undefined(
            IndexName::CvNnd,
            format!("no cluster has more than k = {k} members"),
        ));
    }
    Ok(weighted / weight as f64)
}
