//! Isolation Forest on node rows.

use rand::seq::index::sample;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream_rng, Stream};
use crate::scoring::{HubScores, ScoreMetric};
use crate::spectral::SignalMatrix;

pub const DEFAULT_TREES: usize = 100;
pub const MAX_SUBSAMPLE: usize = 256;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Average unsuccessful-search path length in a binary search tree of `n`
/// points.
pub fn average_path_length(n: usize) -> f64 {
    match n {
        0 | 1 => 0.0,
        2 => 1.0,
        _ => {
            let m = (n - 1) as f64;
            2.0 * (m.ln() + EULER_GAMMA) - 2.0 * m / n as f64
        }
    }
}

enum Node {
    Leaf { size: usize },
    Split { feature: usize, threshold: f64, left: Box<Node>, right: Box<Node> },
}

fn build(x: &SignalMatrix, rows: &mut [usize], depth: usize, limit: usize, rng: &mut impl rand::Rng) -> Node {
    if rows.len() <= 1 || depth >= limit {
        return Node::Leaf { size: rows.len() };
    }
    let spread: Vec<(usize, f64, f64)> = (0..x.ncols())
        .filter_map(|c| {
            let (lo, hi) = rows
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(x[(r, c)]), hi.max(x[(r, c)])));
            (hi > lo).then_some((c, lo, hi))
        })
        .collect();
    if spread.is_empty() {
        return Node::Leaf { size: rows.len() };
    }
    let (feature, lo, hi) = spread[rng.random_range(0..spread.len())];
    let mut threshold = lo + rng.random::<f64>() * (hi - lo);
    if threshold <= lo {
        threshold = lo + (hi - lo) * 0.5;
    }
    let mut split = 0;
    for i in 0..rows.len() {
        if x[(rows[i], feature)] < threshold {
            rows.swap(i, split);
            split += 1;
        }
    }
    let (left_rows, right_rows) = rows.split_at_mut(split);
    Node::Split {
        feature,
        threshold,
        left: Box::new(build(x, left_rows, depth + 1, limit, rng)),
        right: Box::new(build(x, right_rows, depth + 1, limit, rng)),
    }
}

fn path_length(node: &Node, x: &SignalMatrix, row: usize) -> f64 {
    let mut node = node;
    let mut depth = 0.0;
    loop {
        match node {
            Node::Leaf { size } => return depth + average_path_length(*size),
            Node::Split { feature, threshold, left, right } => {
                node = if x[(row, *feature)] < *threshold { left } else { right };
                depth += 1.0;
            }
        }
    }
}

/// Anomaly scores `2^{−E[h(x)] / c(ψ)}` with subsample size
/// `ψ = min(256, N)`; each tree draws its own seed from `seed`.
pub fn isolation_forest_scores(x: &SignalMatrix, n_trees: usize, seed: u64) -> Result<HubScores> {
    let n = x.nrows();
    if n < 2 {
        return Err(Error::invalid("signals", "isolation forest needs at least 2 rows"));
    }
    if n_trees < 1 {
        return Err(Error::invalid("n_trees", "must be at least 1"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("signals"));
    }
    let psi = n.min(MAX_SUBSAMPLE);
    let limit = (psi as f64).log2().ceil() as usize;
    let per_tree: Vec<Vec<f64>> = (0..n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(derive_seed(seed, &[t as u64]), Stream::Forest);
            let mut rows = sample(&mut rng, n, psi).into_vec();
            let tree = build(x, &mut rows, 0, limit, &mut rng);
            (0..n).map(|r| path_length(&tree, x, r)).collect()
        })
        .collect();
    // Summed in tree order so the result does not depend on scheduling.
    let mut totals = vec![0.0; n];
    for lengths in &per_tree {
        totals.iter_mut().zip(lengths).for_each(|(a, b)| *a += b);
    }
    let norm = average_path_length(psi);
    let scores = totals
        .into_iter()
        .map(|total| 2f64.powf(-(total / n_trees as f64) / norm))
        .collect();
    Ok(HubScores::new(ScoreMetric::IsolationForest, scores))
}
