//! Within-cluster homogeneity: average within-cluster distance, maximum
//! diameter, widest within-cluster gap and centroid/medoid representation.

use crate::data::{Dataset, DistanceMatrix, Partition};

/// Mean over observations of the average distance to the other members of
/// their cluster. Singleton clusters contribute 0.
pub fn avewithin(dm: &DistanceMatrix, c: &Partition) -> f64 {
    let mut total = 0.0;
    for members in c.members() {
        let nk = members.len();
        if nk < 2 {
            continue;
        }
        let mut pair_sum = 0.0;
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                pair_sum += dm.get(i, j);
            }
        }
        // each unordered pair counts once for each of its two members
        total += 2.0 * pair_sum / (nk - 1) as f64;
    }
    total / c.n() as f64
}

/// Largest within-cluster distance.
pub fn maxdiameter(dm: &DistanceMatrix, c: &Partition) -> f64 {
    let mut max = 0.0f64;
    for members in c.members() {
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                max = max.max(dm.get(i, j));
            }
        }
    }
    max
}

/// Largest edge of a minimum spanning tree over `members` (Prim, O(m²)).
pub(crate) fn mst_max_edge(dm: &DistanceMatrix, members: &[usize]) -> f64 {
    let m = members.len();
    if m < 2 {
        return 0.0;
    }
    let mut in_tree = vec![false; m];
    let mut link = vec![f64::INFINITY; m];
    let mut current = 0;
    in_tree[0] = true;
    let mut widest = 0.0f64;
    for _ in 1..m {
        let mut next = usize::MAX;
        for b in 0..m {
            if in_tree[b] {
                continue;
            }
            link[b] = link[b].min(dm.get(members[current], members[b]));
            if next == usize::MAX || link[b] < link[next] {
                next = b;
            }
        }
        widest = widest.max(link[next]);
        in_tree[next] = true;
        current = next;
    }
    widest
}

/// Widest within-cluster gap: over all clusters and all two-way splits of a
/// cluster, the largest minimum distance across the split. Equal to the
/// largest minimum-spanning-tree edge within each cluster.
pub fn widestgap(dm: &DistanceMatrix, c: &Partition) -> f64 {
    c.members()
        .iter()
        .map(|members| mst_max_edge(dm, members))
        .fold(0.0, f64::max)
}

/// `(Σ squared distances to cluster means, Σ distances to cluster medoids)`.
pub fn centroid_representation(d: &Dataset, dm: &DistanceMatrix, c: &Partition) -> (f64, f64) {
    let p = d.p();
    let mut wcss = 0.0;
    let mut sumdist = 0.0;
    for members in c.members() {
        let mut mean = vec![0.0; p];
        for &i in &members {
            for (m, x) in mean.iter_mut().zip(d.row(i)) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= members.len() as f64);
        for &i in &members {
            wcss += d.row(i).iter().zip(&mean).map(|(x, m)| (x - m) * (x - m)).sum::<f64>();
        }
        sumdist += members
            .iter()
            .map(|&m| members.iter().map(|&i| dm.get(i, m)).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
    }
    (wcss, sumdist)
}
