//! Library results checked against independent, deliberately naive implementations.

mod common;

use approx::assert_abs_diff_eq;
use clustbench::cluster::{cut, hclust, kmeans, pam, Linkage};
use clustbench::data::{euclidean_distances, DistanceMatrix, Partition};
use clustbench::external::{contingency, external_scores};
use clustbench::indexes::{
    asw, avewithin, centroid_representation, denscut, density_mode, kdnorm, kernel_density, maxdiameter, pearsongamma,
    sindex, widestgap, KernelDensity,
};
use common::{dm1d, gaussian, labels, random_labels, rng};
use rand::prelude::*;

fn full(dm: &DistanceMatrix) -> Vec<Vec<f64>> {
    let n = dm.n();
    (0..n).map(|i| (0..n).map(|j| dm.get(i, j)).collect()).collect()
}

/// Step-by-step growth from the cluster mode, scanning all (outside, inside) pairs every step.
fn density_mode_trace(d: &[Vec<f64>], lab: &[usize], h: &[f64]) -> (f64, f64) {
    let n = d.len();
    let k = lab.iter().max().unwrap() + 1;
    let mut penalty = 0.0;
    let mut t = Vec::new();
    for c in 0..k {
        let members: Vec<usize> = (0..n).filter(|&i| lab[i] == c).collect();
        let mut mode = members[0];
        for &i in &members {
            if h[i] > h[mode] {
                mode = i;
            }
        }
        let mut grown = vec![mode];
        let mut remainder: Vec<usize> = members.iter().copied().filter(|&i| i != mode).collect();
        while !remainder.is_empty() {
            let mut best: Option<(f64, usize, usize)> = None;
            for &x in &remainder {
                for &y in &grown {
                    if best.is_none_or(|b| d[x][y] < b.0) {
                        best = Some((d[x][y], x, y));
                    }
                }
            }
            let (dist, x, y) = best.unwrap();
            let top = remainder.iter().map(|&z| h[z]).fold(f64::MIN, f64::max);
            t.push(top * dist);
            if h[x] > h[y] {
                penalty += (h[x] - h[y]).powi(2);
            }
            remainder.retain(|&z| z != x);
            grown.push(x);
        }
    }
    ((penalty / n as f64).sqrt(), t.into_iter().fold(0.0, f64::max))
}

fn naive_density(d: &[Vec<f64>], q: f64) -> Vec<f64> {
    d.iter()
        .map(|row| row.iter().map(|&x| if x <= q { 1.0 - x / q } else { 0.0 }).sum())
        .collect()
}

#[test]
fn density_mode_matches_frozen_trace() {
    // values from an independent script following the published steps literally
    let dm = dm1d(&[0.0, 0.5, 1.7, 2.0, 2.1, 3.5, 6.0, 6.3]);
    let c = labels(&[0, 0, 0, 1, 1, 1, 1, 0]);
    let kd = kernel_density(&dm, 0.3).unwrap();
    assert_abs_diff_eq!(kd.q, 1.51, epsilon = 1e-12);
    let r = density_mode(&dm, &c, &kd);
    assert_abs_diff_eq!(r.densdec, 0.255_214_036_918_323_5, epsilon = 1e-12);
    assert_abs_diff_eq!(r.highdgap, 8.286_092_715_231_788, epsilon = 1e-12);
    assert_eq!(r.t_set.len(), 6);
}

#[test]
fn density_mode_three_point_trace() {
    // h = (1.5, 2, 1.5) with q = 2; growth from the middle point, both gaps 1.5·1
    let dm = dm1d(&[0.0, 1.0, 2.0]);
    let kd = kernel_density(&dm, 1.0).unwrap();
    assert_eq!(kd.h, vec![1.5, 2.0, 1.5]);
    let r = density_mode(&dm, &labels(&[0, 0, 0]), &kd);
    assert_eq!(r.densdec, 0.0);
    assert_eq!(r.t_set, vec![1.5, 1.5]);
    assert_eq!(r.highdgap, 1.5);
}

#[test]
fn density_mode_matches_trace_on_random_data() {
    let mut r = rng(11);
    for case in 0..40 {
        let n = r.gen_range(4..30);
        let k = r.gen_range(1..4.min(n));
        let data = gaussian(n, 2, 100 + case);
        let dm = euclidean_distances(&data).unwrap();
        let lab = random_labels(&mut r, n, k);
        let kd = kernel_density(&dm, 0.2).unwrap();
        let d = full(&dm);
        let h = naive_density(&d, kd.q);
        for (a, b) in h.iter().zip(&kd.h) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        let got = density_mode(&dm, &labels(&lab), &kd);
        let (densdec, highdgap) = density_mode_trace(&d, &lab, &kd.h);
        assert_abs_diff_eq!(got.densdec, densdec, epsilon = 1e-12);
        assert_abs_diff_eq!(got.highdgap, highdgap, epsilon = 1e-12);
    }
}

#[test]
fn denscut_two_overlapping_points() {
    let dm = dm1d(&[0.0, 1.0]);
    let kd = KernelDensity::with_radius(&dm, 2.0).unwrap();
    assert_eq!(kd.h, vec![1.5, 1.5]);
    assert_eq!(denscut(&dm, &labels(&[0, 1]), &kd), 0.75);
    assert_eq!(denscut(&dm, &labels(&[0, 0]), &kd), 0.0);
}

fn naive_silhouette(d: &[Vec<f64>], lab: &[usize]) -> f64 {
    let n = d.len();
    let k = lab.iter().max().unwrap() + 1;
    let mut total = 0.0;
    for i in 0..n {
        let own = lab.iter().filter(|&&l| l == lab[i]).count();
        if own == 1 {
            continue;
        }
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for j in 0..n {
            if j != i {
                sums[lab[j]] += d[i][j];
                counts[lab[j]] += 1;
            }
        }
        let a = sums[lab[i]] / counts[lab[i]] as f64;
        let b = (0..k)
            .filter(|&c| c != lab[i])
            .map(|c| sums[c] / counts[c] as f64)
            .fold(f64::INFINITY, f64::min);
        total += (b - a) / a.max(b);
    }
    total / n as f64
}

#[test]
fn asw_matches_double_loop() {
    let mut r = rng(12);
    for case in 0..50 {
        let n = r.gen_range(3..40);
        let k = r.gen_range(2..=3.min(n));
        let dm = euclidean_distances(&gaussian(n, 3, 200 + case)).unwrap();
        let lab = random_labels(&mut r, n, k);
        let got = asw(&dm, &labels(&lab)).unwrap();
        assert_abs_diff_eq!(got, naive_silhouette(&full(&dm), &lab), epsilon = 1e-10);
    }
}

#[test]
fn asw_negative_for_mixed_duplicates() {
    // two tight pairs, each cluster takes one point from each pair
    let dm = dm1d(&[0.0, 0.0, 5.0, 5.0]);
    assert!(asw(&dm, &labels(&[0, 1, 0, 1])).unwrap() < 0.0);
}

/// Largest bottleneck over all two-way splits, by enumerating subsets.
pub fn widest_split(d: &[Vec<f64>], members: &[usize]) -> f64 {
    let m = members.len();
    if m < 2 {
        return 0.0;
    }
    let mut best = 0.0f64;
    // fix the first member on one side to skip mirrored splits
    for mask in 0..(1u32 << (m - 1)) {
        let side = |i: usize| i > 0 && mask & (1 << (i - 1)) != 0;
        let mut gap = f64::INFINITY;
        for a in 0..m {
            for b in 0..m {
                if !side(a) && side(b) {
                    gap = gap.min(d[members[a]][members[b]]);
                }
            }
        }
        if gap.is_finite() {
            best = best.max(gap);
        }
    }
    best
}

#[test]
fn widestgap_matches_split_enumeration() {
    let mut r = rng(13);
    for case in 0..60 {
        let n = r.gen_range(2..=12);
        let dm = euclidean_distances(&gaussian(n, 2, 300 + case)).unwrap();
        let all: Vec<usize> = (0..n).collect();
        assert_eq!(widestgap(&dm, &labels(&vec![0; n])), widest_split(&full(&dm), &all));
    }
}

#[test]
fn homogeneity_naive_sums() {
    let mut r = rng(14);
    for case in 0..30 {
        let n = r.gen_range(2..25);
        let k = r.gen_range(1..=3.min(n));
        let data = gaussian(n, 2, 400 + case);
        let dm = euclidean_distances(&data).unwrap();
        let lab = random_labels(&mut r, n, k);
        let c = labels(&lab);
        let d = full(&dm);

        let mut per_point = 0.0;
        let mut diam = 0.0f64;
        for i in 0..n {
            let mates: Vec<usize> = (0..n).filter(|&j| j != i && lab[j] == lab[i]).collect();
            if !mates.is_empty() {
                per_point += mates.iter().map(|&j| d[i][j]).sum::<f64>() / mates.len() as f64;
            }
            for &j in &mates {
                diam = diam.max(d[i][j]);
            }
        }
        assert_abs_diff_eq!(avewithin(&dm, &c), per_point / n as f64, epsilon = 1e-12);
        assert_eq!(maxdiameter(&dm, &c), diam);

        let (wcss, sumdist) = centroid_representation(&data, &dm, &c);
        let mut w = 0.0;
        let mut s = 0.0;
        for members in c.members() {
            for j in 0..data.p() {
                let mean = members.iter().map(|&i| data.value(i, j)).sum::<f64>() / members.len() as f64;
                w += members.iter().map(|&i| (data.value(i, j) - mean).powi(2)).sum::<f64>();
            }
            s += members
                .iter()
                .map(|&m| members.iter().map(|&i| d[i][m]).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
        }
        assert_abs_diff_eq!(wcss, w, epsilon = 1e-10);
        assert_abs_diff_eq!(sumdist, s, epsilon = 1e-10);
    }
}

#[test]
fn separation_naive() {
    let mut r = rng(15);
    for case in 0..30 {
        let n = r.gen_range(4..40);
        let dm = euclidean_distances(&gaussian(n, 2, 500 + case)).unwrap();
        let k = r.gen_range(2..4);
        let lab = random_labels(&mut r, n, k);
        let c = labels(&lab);
        let d = full(&dm);

        // Pearson correlation over pairs i<j, written out directly
        let (mut xs, mut ys) = (vec![], vec![]);
        for i in 0..n {
            for j in i + 1..n {
                xs.push(d[i][j]);
                ys.push(if lab[i] != lab[j] { 1.0 } else { 0.0 });
            }
        }
        let m = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
        let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        assert_abs_diff_eq!(pearsongamma(&dm, &c).unwrap(), cov / (vx * vy).sqrt(), epsilon = 1e-10);

        // border distances per cluster
        let p = 0.1;
        let (mut total, mut count, mut min_sep) = (0.0, 0usize, f64::INFINITY);
        for members in c.members() {
            let mut border: Vec<f64> = members
                .iter()
                .map(|&i| {
                    (0..n)
                        .filter(|&j| lab[j] != lab[i])
                        .map(|j| d[i][j])
                        .fold(f64::INFINITY, f64::min)
                })
                .collect();
            border.sort_by(f64::total_cmp);
            min_sep = min_sep.min(border[0]);
            let mk = ((p * members.len() as f64).floor() as usize).max(1);
            total += border[..mk].iter().sum::<f64>();
            count += mk;
        }
        let (s, ms) = sindex(&dm, &c, p).unwrap();
        assert_abs_diff_eq!(s, total / count as f64, epsilon = 1e-12);
        assert_eq!(ms, min_sep);
    }
}

#[test]
fn kdnorm_is_affine_invariant() {
    let mut r = rng(16);
    for case in 0..10 {
        let data = gaussian(120, 3, 600 + case);
        let lab = random_labels(&mut r, 120, 2);
        let c = labels(&lab);
        let a: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..3).map(|_| r.gen_range(-2.0..2.0)).collect())
            .collect();
        let shift: Vec<f64> = (0..3).map(|_| r.gen_range(-10.0..10.0)).collect();
        let mapped = data.map_values(|i, j, _| shift[j] + (0..3).map(|l| a[j][l] * data.value(i, l)).sum::<f64>());
        assert_abs_diff_eq!(kdnorm(&data, &c).unwrap(), kdnorm(&mapped, &c).unwrap(), epsilon = 1e-8);
    }
}

/// Agglomeration recomputing every between-cluster distance from the members.
fn naive_hclust(d: &[Vec<f64>], linkage: Linkage) -> (Vec<f64>, Vec<Vec<Vec<usize>>>) {
    let mut clusters: Vec<Vec<usize>> = (0..d.len()).map(|i| vec![i]).collect();
    let mut heights = vec![];
    let mut states = vec![clusters.clone()];
    while clusters.len() > 1 {
        let mut best = (f64::INFINITY, 0, 0);
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let ds: Vec<f64> = clusters[a]
                    .iter()
                    .flat_map(|&i| clusters[b].iter().map(move |&j| d[i][j]))
                    .collect();
                let v = match linkage {
                    Linkage::Single => ds.iter().copied().fold(f64::INFINITY, f64::min),
                    Linkage::Complete => ds.iter().copied().fold(0.0, f64::max),
                    Linkage::Average => ds.iter().sum::<f64>() / ds.len() as f64,
                };
                if v < best.0 {
                    best = (v, a, b);
                }
            }
        }
        let (h, a, b) = best;
        let merged = clusters.remove(b);
        clusters[a].extend(merged);
        heights.push(h);
        states.push(clusters.clone());
    }
    (heights, states)
}

fn labels_of(clusters: &[Vec<usize>], n: usize) -> Partition {
    let mut lab = vec![0; n];
    for (c, members) in clusters.iter().enumerate() {
        for &i in members {
            lab[i] = c;
        }
    }
    labels(&lab)
}

#[test]
fn hclust_matches_naive_agglomeration() {
    for case in 0..20 {
        let n = 3 + case % 12;
        let dm = euclidean_distances(&gaussian(n, 2, 700 + case as u64)).unwrap();
        let d = full(&dm);
        for linkage in [Linkage::Single, Linkage::Average, Linkage::Complete] {
            let dg = hclust(&dm, linkage).unwrap();
            let (heights, states) = naive_hclust(&d, linkage);
            for (m, h) in dg.merges.iter().zip(&heights) {
                assert_abs_diff_eq!(m.height, *h, epsilon = 1e-12);
            }
            for k in 1..=n {
                assert_eq!(
                    cut(&dg, k).unwrap(),
                    labels_of(&states[n - k], n),
                    "{linkage} n={n} k={k}"
                );
            }
        }
    }
}

fn medoid_cost(d: &[Vec<f64>], medoids: &[usize]) -> f64 {
    (0..d.len())
        .map(|i| medoids.iter().map(|&m| d[i][m]).fold(f64::INFINITY, f64::min))
        .sum()
}

#[test]
fn pam_is_swap_optimal() {
    for case in 0..15 {
        let n = 8 + case;
        let k = 2 + case % 3;
        let dm = euclidean_distances(&gaussian(n, 2, 800 + case as u64)).unwrap();
        let d = full(&dm);
        let res = pam(&dm, k, case as u64).unwrap();
        let medoids: Vec<usize> = res
            .partition
            .members()
            .iter()
            .map(|m| {
                *m.iter()
                    .min_by(|&&a, &&b| {
                        let ca: f64 = m.iter().map(|&i| d[i][a]).sum();
                        let cb: f64 = m.iter().map(|&i| d[i][b]).sum();
                        ca.total_cmp(&cb)
                    })
                    .unwrap()
            })
            .collect();
        let cost = medoid_cost(&d, &medoids);
        assert_abs_diff_eq!(res.objective.unwrap(), cost, epsilon = 1e-9);
        for slot in 0..k {
            for o in (0..n).filter(|o| !medoids.contains(o)) {
                let mut swapped = medoids.clone();
                swapped[slot] = o;
                assert!(medoid_cost(&d, &swapped) >= cost - 1e-9);
            }
        }
    }
}

#[test]
fn kmeans_is_a_lloyd_fixed_point() {
    for case in 0..10 {
        let data = gaussian(60, 2, 900 + case);
        let k = 2 + case as usize % 3;
        let res = kmeans(&data, k, 5, case).unwrap();
        let members = res.partition.members();
        let centers: Vec<Vec<f64>> = members
            .iter()
            .map(|m| {
                (0..2)
                    .map(|j| m.iter().map(|&i| data.value(i, j)).sum::<f64>() / m.len() as f64)
                    .collect()
            })
            .collect();
        let sq = |i: usize, c: &[f64]| (0..2).map(|j| (data.value(i, j) - c[j]).powi(2)).sum::<f64>();
        let mut wcss = 0.0;
        for i in 0..data.n() {
            let own = sq(i, &centers[res.partition.label(i)]);
            wcss += own;
            for c in &centers {
                assert!(own <= sq(i, c) + 1e-12);
            }
        }
        assert_abs_diff_eq!(res.objective.unwrap(), wcss, epsilon = 1e-9);
    }
}

// pair counting and per-observation averaging, with no contingency table

fn ari_pairs(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len();
    let (mut both, mut in_a, mut in_b) = (0.0, 0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let sa = a[i] == a[j];
            let sb = b[i] == b[j];
            both += (sa && sb) as u8 as f64;
            in_a += sa as u8 as f64;
            in_b += sb as u8 as f64;
        }
    }
    let total = (n * (n - 1) / 2) as f64;
    let expected = in_a * in_b / total;
    let max = 0.5 * (in_a + in_b);
    if max == expected {
        1.0
    } else {
        (both - expected) / (max - expected)
    }
}

fn entropy_of(keys: &[(usize, usize)]) -> f64 {
    let n = keys.len() as f64;
    let mut seen: Vec<(&(usize, usize), usize)> = vec![];
    for k in keys {
        match seen.iter_mut().find(|(s, _)| *s == k) {
            Some(e) => e.1 += 1,
            None => seen.push((k, 1)),
        }
    }
    -seen
        .iter()
        .map(|(_, c)| *c as f64 / n * (*c as f64 / n).ln())
        .sum::<f64>()
}

fn vi_entropies(a: &[usize], b: &[usize]) -> f64 {
    let ha = entropy_of(&a.iter().map(|&x| (x, 0)).collect::<Vec<_>>());
    let hb = entropy_of(&b.iter().map(|&x| (x, 0)).collect::<Vec<_>>());
    let hab = entropy_of(&a.iter().zip(b).map(|(&x, &y)| (x, y)).collect::<Vec<_>>());
    2.0 * hab - ha - hb
}

fn bcubed_points(truth: &[usize], pred: &[usize]) -> (f64, f64) {
    let n = truth.len();
    let (mut p, mut r) = (0.0, 0.0);
    for i in 0..n {
        let same_pred = (0..n).filter(|&j| pred[j] == pred[i]).count() as f64;
        let same_truth = (0..n).filter(|&j| truth[j] == truth[i]).count() as f64;
        let both = (0..n).filter(|&j| pred[j] == pred[i] && truth[j] == truth[i]).count() as f64;
        p += both / same_pred;
        r += both / same_truth;
    }
    (p / n as f64, r / n as f64)
}

pub fn check_external_pair(a: &[usize], b: &[usize]) {
    let s = external_scores(&labels(a), &labels(b)).unwrap();
    assert_abs_diff_eq!(s.ari, ari_pairs(a, b), epsilon = 1e-12);
    assert_abs_diff_eq!(s.vi, vi_entropies(a, b), epsilon = 1e-12);
    let (p, r) = bcubed_points(a, b);
    assert_abs_diff_eq!(s.bcubed_p, p, epsilon = 1e-12);
    assert_abs_diff_eq!(s.bcubed_r, r, epsilon = 1e-12);
}

#[test]
fn external_indexes_match_brute_force() {
    let mut r = rng(17);
    for _ in 0..300 {
        let n = r.gen_range(2..=10);
        let a: Vec<usize> = (0..n).map(|_| r.gen_range(0..4)).collect();
        let b: Vec<usize> = (0..n).map(|_| r.gen_range(0..4)).collect();
        check_external_pair(&a, &b);
    }
}

#[test]
fn wholesale_table_from_partitions() {
    let mut truth = vec![0; 298];
    truth.extend(vec![1; 142]);
    let mut single = vec![0; 440];
    single[0] = 1;
    let t = contingency(&labels(&truth), &labels(&single)).unwrap();
    assert_eq!(t.counts(), &[vec![1, 297], vec![0, 142]]);
    let s = external_scores(&labels(&truth), &labels(&single)).unwrap();
    assert_abs_diff_eq!(s.vi, 0.643_238_110_660_063_9, epsilon = 1e-12);
    assert_abs_diff_eq!(s.bcubed_f, 0.719_496_235_743_822_2, epsilon = 1e-12);
}
