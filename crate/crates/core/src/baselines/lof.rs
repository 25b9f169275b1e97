//! Local Outlier Factor on node rows (Euclidean).

use crate::error::{Error, Result};
use crate::scoring::{HubScores, ScoreMetric};
use crate::spectral::SignalMatrix;

/// Regularizer on the mean reachability distance, so a set of duplicate
/// points has finite equal densities and LOF exactly 1.
const DENSITY_EPS: f64 = 1e-10;

pub const DEFAULT_NEIGHBORS: usize = 20;

fn pairwise_distances(x: &SignalMatrix) -> Vec<Vec<f64>> {
    let n = x.nrows();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let dist = (x.row(i) - x.row(j)).norm();
            d[i][j] = dist;
            d[j][i] = dist;
        }
    }
    d
}

/// LOF scores; higher means more anomalous, ≈ 1 inside a uniform cluster.
///
/// Each point's neighborhood is its `k` nearest other points (ties by
/// lower index).
pub fn lof_scores(x: &SignalMatrix, k: usize) -> Result<HubScores> {
    let n = x.nrows();
    if k < 1 {
        return Err(Error::invalid("k", "must be at least 1"));
    }
    if k >= n {
        return Err(Error::invalid("k", format!("must be smaller than the number of rows ({n}), got {k}")));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("signals"));
    }
    let dist = pairwise_distances(x);
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            others.sort_by(|&a, &b| dist[i][a].total_cmp(&dist[i][b]).then(a.cmp(&b)));
            others.truncate(k);
            others
        })
        .collect();
    let k_distance: Vec<f64> = (0..n).map(|i| dist[i][neighbors[i][k - 1]]).collect();
    let lrd: Vec<f64> = (0..n)
        .map(|i| {
            let mean_reach =
                neighbors[i].iter().map(|&o| k_distance[o].max(dist[i][o])).sum::<f64>() / k as f64;
            1.0 / (mean_reach + DENSITY_EPS)
        })
        .collect();
    let scores = (0..n)
        .map(|i| {
            let mean_neighbor_lrd = neighbors[i].iter().map(|&o| lrd[o]).sum::<f64>() / k as f64;
            mean_neighbor_lrd / lrd[i]
        })
        .collect();
    Ok(HubScores::new(ScoreMetric::LocalOutlierFactor, scores))
}
