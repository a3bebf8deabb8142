//! Exact O(n^2) silhouette scores on Euclidean distances.

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

/// Per-point silhouette components and the overall mean.
#[derive(Debug, Clone)]
pub struct SilhouetteBreakdown {
    /// Mean distance to the other points of the own cluster (0 for singletons).
    pub a: Vec<f64>,
    /// Mean distance to the nearest other cluster.
    pub b: Vec<f64>,
    /// (b - a) / max(a, b); 0 for singleton clusters.
    pub s: Vec<f64>,
    pub overall: f64,
}

fn euclidean(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Computes the silhouette of a hard labeling in the matrix's feature space.
///
/// Requires at least two distinct labels. `a` excludes the point itself;
/// `b` minimizes the mean distance over the other clusters.
pub fn silhouette(matrix: &FeatureMatrix, labels: &[usize]) -> Result<SilhouetteBreakdown> {
    let n = matrix.n_rows();
    if labels.len() != n {
        return Err(Error::LabelLengthMismatch {
            labels: labels.len(),
            rows: n,
        });
    }
    let k = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut cluster_sizes = vec![0usize; k];
    for &l in labels {
        cluster_sizes[l] += 1;
    }
    if cluster_sizes.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::SingleCluster);
    }

    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut sums = vec![0.0; k];

    for i in 0..n {
        sums.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..n {
            if i == j {
                continue;
            }
            sums[labels[j]] += euclidean(matrix.row(i), matrix.row(j));
        }
        let own = labels[i];
        let own_others = cluster_sizes[own] - 1;
        a[i] = if own_others == 0 {
            0.0
        } else {
            sums[own] / own_others as f64
        };
        b[i] = (0..k)
            .filter(|&c| c != own && cluster_sizes[c] > 0)
            .map(|c| sums[c] / cluster_sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        s[i] = if own_others == 0 {
            0.0
        } else {
            let denom = a[i].max(b[i]);
            if denom == 0.0 {
                0.0
            } else {
                (b[i] - a[i]) / denom
            }
        };
    }
    let overall = s.iter().sum::<f64>() / n as f64;
    Ok(SilhouetteBreakdown { a, b, s, overall })
}
