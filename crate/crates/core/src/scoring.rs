//! Hub scores and hub selection rules.

use serde::{Deserialize, Serialize};

use crate::community::{louvain_with_restarts, participation_coefficient};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::SignalMatrix;
use crate::synth::population_std;

/// Strict participation bounds for connector hubs.
pub const CONNECTOR_LOW: f64 = 0.35;
pub const CONNECTOR_HIGH: f64 = 0.72;

/// Default z-score cut for thresholded selection.
pub const DEFAULT_Z_CUT: f64 = 3.0;

/// Default fraction of positions searched by the elbow rule.
pub const DEFAULT_ELBOW_WINDOW: f64 = 0.2;

/// Which quantity a score vector holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreMetric {
    ReconstructionError,
    Smoothness,
    DegreeCentrality,
    EigenvectorCentrality,
    ClosenessCentrality,
    BetweennessCentrality,
    LocalOutlierFactor,
    IsolationForest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HubScores {
    pub metric: ScoreMetric,
    pub scores: Vec<f64>,
}

impl HubScores {
    pub fn new(metric: ScoreMetric, scores: Vec<f64>) -> Self {
        Self { metric, scores }
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

fn check_same_shape(f: &SignalMatrix, filtered: &SignalMatrix) -> Result<()> {
    if f.shape() != filtered.shape() {
        return Err(Error::DimensionMismatch {
            context: "filtered vs original signals",
            expected: f.nrows() * f.ncols(),
            found: filtered.nrows() * filtered.ncols(),
        });
    }
    Ok(())
}

/// `‖F_i − F̃_i‖²` per node.
pub fn score_reconstruction(f: &SignalMatrix, filtered: &SignalMatrix) -> Result<HubScores> {
    check_same_shape(f, filtered)?;
    let diff = f - filtered;
    let scores = diff.row_iter().map(|r| r.norm_squared()).collect();
    Ok(HubScores::new(ScoreMetric::ReconstructionError, scores))
}

/// `Σ_j A_ij ‖X_i − X_j‖²` per node.
pub fn node_gradient_energy(g: &Graph, x: &SignalMatrix) -> Result<Vec<f64>> {
    if x.nrows() != g.n_nodes() {
        return Err(Error::DimensionMismatch {
            context: "signal rows vs graph nodes",
            expected: g.n_nodes(),
            found: x.nrows(),
        });
    }
    let p = x.ncols();
    Ok((0..g.n_nodes())
        .map(|i| {
            g.neighbors(i)
                .iter()
                .map(|&(j, w)| {
                    let d2: f64 = (0..p).map(|c| (x[(i, c)] - x[(j, c)]).powi(2)).sum();
                    w * d2
                })
                .sum()
        })
        .collect())
}

/// `E(i) − Ẽ(i)`: drop in local gradient energy caused by filtering. May be
/// negative.
pub fn score_smoothness(g: &Graph, f: &SignalMatrix, filtered: &SignalMatrix) -> Result<HubScores> {
    check_same_shape(f, filtered)?;
    let before = node_gradient_energy(g, f)?;
    let after = node_gradient_energy(g, filtered)?;
    let scores = before.iter().zip(&after).map(|(b, a)| b - a).collect();
    Ok(HubScores::new(ScoreMetric::Smoothness, scores))
}

/// Hub selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Selection {
    ZThreshold { z_cut: f64 },
    TopK { k: usize },
    /// Top-K with K picked at the largest drop of the sorted scores.
    Elbow { window: f64, k: usize },
}

/// Nodes whose z-score (population std) exceeds `z_cut`.
pub fn select_zthreshold(scores: &[f64], z_cut: f64) -> Result<Vec<usize>> {
    if scores.len() < 2 {
        return Err(Error::invalid("scores", "z-score selection needs at least 2 nodes"));
    }
    let mean = scores.iter().sum::<f64>() / scores.len() as f64;
    let std = population_std(scores.iter().copied());
    if std == 0.0 {
        log::warn!("all hub scores are equal; z-threshold selects nothing");
        return Ok(Vec::new());
    }
    Ok(scores
        .iter()
        .enumerate()
        .filter_map(|(i, &s)| ((s - mean) / std > z_cut).then_some(i))
        .collect())
}

/// Node ids by descending score, ties by ascending id.
pub fn rank_descending(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// The `k` highest-scoring nodes, returned sorted by id.
pub fn select_topk(scores: &[f64], k: usize) -> Result<Vec<usize>> {
    if k < 1 || k > scores.len() {
        return Err(Error::invalid("k", format!("must lie in 1..={}, got {k}", scores.len())));
    }
    let mut picked = rank_descending(scores);
    picked.truncate(k);
    picked.sort_unstable();
    Ok(picked)
}

/// Elbow rule on scores sorted in descending order.
///
/// Returns the 1-based position `k` maximizing the drop `s_k − s_{k+1}`
/// among the first `min(N − 1, max(⌈window·N⌉, 3))` positions; the first
/// maximal drop wins.
pub fn select_k_elbow(sorted_desc: &[f64], window: f64) -> Result<usize> {
    let n = sorted_desc.len();
    if n < 3 {
        return Err(Error::invalid("scores", "elbow selection needs at least 3 values"));
    }
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::invalid("window", format!("must lie in (0, 1], got {window}")));
    }
    let span = ((window * n as f64).ceil() as usize).max(3).min(n - 1);
    let mut best = 1;
    let mut best_gap = f64::NEG_INFINITY;
    for k in 1..=span {
        let gap = sorted_desc[k - 1] - sorted_desc[k];
        if gap > best_gap {
            best_gap = gap;
            best = k;
        }
    }
    Ok(best)
}

/// Hubs with participation strictly inside the connector band.
pub fn connector_filter(hub_set: &[usize], participation: &[f64]) -> Vec<usize> {
    hub_set
        .iter()
        .copied()
        .filter(|&i| {
            participation
                .get(i)
                .is_some_and(|&p| p > CONNECTOR_LOW && p < CONNECTOR_HIGH)
        })
        .collect()
}

/// Hub decisions for one score vector.
#[derive(Debug, Clone, Serialize)]
pub struct HubReport {
    pub scores: HubScores,
    pub selection: Selection,
    pub hub_set: Vec<usize>,
    pub connector_set: Vec<usize>,
    pub communities: Vec<usize>,
    pub participation: Vec<f64>,
}

/// Applies `rule` to `scores` and flags connector hubs using Louvain
/// communities of `g`. For [`Selection::Elbow`] the chosen K is written
/// back into the returned selection.
pub fn build_report(
    g: &Graph,
    scores: HubScores,
    rule: Selection,
    community_seed: u64,
    restarts: usize,
) -> Result<HubReport> {
    if scores.len() != g.n_nodes() {
        return Err(Error::DimensionMismatch {
            context: "scores vs graph nodes",
            expected: g.n_nodes(),
            found: scores.len(),
        });
    }
    let (selection, hub_set) = match rule {
        Selection::ZThreshold { z_cut } => (rule, select_zthreshold(&scores.scores, z_cut)?),
        Selection::TopK { k } => (rule, select_topk(&scores.scores, k)?),
        Selection::Elbow { window, .. } => {
            let sorted: Vec<f64> = rank_descending(&scores.scores)
                .into_iter()
                .map(|i| scores.scores[i])
                .collect();
            let k = select_k_elbow(&sorted, window)?;
            (Selection::Elbow { window, k }, select_topk(&scores.scores, k)?)
        }
    };
    let communities = louvain_with_restarts(g, community_seed, restarts);
    let participation = participation_coefficient(g, &communities)?;
    let connector_set = connector_filter(&hub_set, &participation);
    Ok(HubReport {
        scores,
        selection,
        hub_set,
        connector_set,
        communities,
        participation,
    })
}
