//! Density-based indexes built on a triangular kernel whose radius is a
//! quantile of all pairwise distances.

use crate::data::{DistanceMatrix, Partition};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct KernelDensity {
    /// Kernel radius, in distance units.
    pub q: f64,
    /// Density of every observation, including its own contribution κ(0) = 1.
    pub h: Vec<f64>,
    pub p_quantile: f64,
}

impl KernelDensity {
    /// Kernel density with an explicitly chosen radius.
    pub fn with_radius(dm: &DistanceMatrix, q: f64) -> Result<Self> {
        if !(q > 0.0) {
            return Err(Error::ZeroKernelRadius);
        }
        let n = dm.n();
        let mut h = vec![1.0; n];
        for (i, j, d) in dm.pairs() {
            let k = kernel(d, q);
            h[i] += k;
            h[j] += k;
        }
        Ok(KernelDensity {
            q,
            h,
            p_quantile: f64::NAN,
        })
    }

    #[inline]
    pub fn kappa(&self, d: f64) -> f64 {
        kernel(d, self.q)
    }
}

#[inline]
fn kernel(d: f64, q: f64) -> f64 {
    if d <= q {
        1.0 - d / q
    } else {
        0.0
    }
}

/// Quantile with linear interpolation between order statistics.
pub(crate) fn quantile(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    let pos = (v.len() - 1) as f64 * p;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    let (_, &mut at_lo, upper) = v.select_nth_unstable_by(lo, f64::total_cmp);
    if frac == 0.0 || upper.is_empty() {
        return at_lo;
    }
    let at_hi = upper.iter().copied().fold(f64::INFINITY, f64::min);
    at_lo + frac * (at_hi - at_lo)
}

/// Kernel density with radius equal to the `p`-quantile of the distances.
pub fn kernel_density(dm: &DistanceMatrix, p: f64) -> Result<KernelDensity> {
    if dm.n() < 2 {
        return Err(Error::InvalidDataset("kernel density needs n >= 2".into()));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Config(format!(
            "kernel quantile level must be in (0, 1], got {p}"
        )));
    }
    let q = quantile(dm.entries(), p);
    let mut kd = KernelDensity::with_radius(dm, q)?;
    kd.p_quantile = p;
    Ok(kd)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityModeResult {
    pub densdec: f64,
    pub highdgap: f64,
    /// Every gap value collected while growing the clusters from their modes.
    pub t_set: Vec<f64>,
}

/// Density decrease and high-density gap indexes.
///
/// Each cluster is grown from its densest point, attaching at every step the
/// remaining member closest to the grown set. Attaching a point denser than
/// its neighbour in the set is penalised by the squared density increase.
/// Each attachment also records the attachment distance times the highest
/// density among the members not yet attached (including the attached
/// point). Ties go to the lowest observation index.
pub fn density_mode(dm: &DistanceMatrix, c: &Partition, kd: &KernelDensity) -> DensityModeResult {
    let h = &kd.h;
    let mut penalty = 0.0;
    let mut t_set = Vec::new();
    for members in c.members() {
        if members.len() < 2 {
            continue;
        }
        let mut mode = members[0];
        for &i in &members[1..] {
            if h[i] > h[mode] {
                mode = i;
            }
        }
        // remaining members with their closest attached point
        let mut rest: Vec<(usize, f64, usize)> = members
            .iter()
            .filter(|&&z| z != mode)
            .map(|&z| (z, dm.get(z, mode), mode))
            .collect();
        while !rest.is_empty() {
            let mut pick = 0;
            for (r, cand) in rest.iter().enumerate().skip(1) {
                if cand.1 < rest[pick].1 {
                    pick = r;
                }
            }
            let max_rest = rest.iter().map(|&(z, _, _)| h[z]).fold(f64::NEG_INFINITY, f64::max);
            let (x, dist, y) = rest.remove(pick);
            t_set.push(max_rest * dist);
            if h[x] > h[y] {
                penalty += (h[x] - h[y]).powi(2);
            }
            for entry in rest.iter_mut() {
                let d = dm.get(entry.0, x);
                if d < entry.1 || (d == entry.1 && x < entry.2) {
                    entry.1 = d;
                    entry.2 = x;
                }
            }
        }
    }
    DensityModeResult {
        densdec: (penalty / c.n() as f64).sqrt(),
        highdgap: t_set.iter().copied().fold(0.0, f64::max),
        t_set,
    }
}

/// Mean over observations of density times the density contributed by other clusters.
pub fn denscut(dm: &DistanceMatrix, c: &Partition, kd: &KernelDensity) -> f64 {
    let n = dm.n();
    let mut foreign = vec![0.0; n];
    for (i, j, d) in dm.pairs() {
        if c.label(i) != c.label(j) {
            let k = kd.kappa(d);
            foreign[i] += k;
            foreign[j] += k;
        }
    }
    kd.h.iter().zip(&foreign).map(|(h, f)| h * f).sum::<f64>() / n as f64
}
