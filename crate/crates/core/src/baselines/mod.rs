//! Comparison detectors. Each maps a graph, its signals, or both to one
//! score per node.

pub mod centrality;
pub mod iforest;
pub mod lof;
pub mod smoothing;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scoring::{score_reconstruction, score_smoothness, HubScores};
use crate::spectral::{SignalMatrix, SpectralDecomposition};

pub use centrality::{betweenness_centrality, closeness_centrality, degree_centrality, eigenvector_centrality};
pub use iforest::isolation_forest_scores;
pub use lof::lof_scores;
pub use smoothing::{direct_f_recovery, ghf_filter, DirectConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BaselineKind {
    DegreeCentrality,
    EigenvectorCentrality,
    ClosenessCentrality,
    BetweennessCentrality,
    #[serde(rename = "GHF_RE")]
    GhfRe,
    #[serde(rename = "GHF_Sm")]
    GhfSm,
    #[serde(rename = "DirectF_RE")]
    DirectRe,
    #[serde(rename = "DirectF_Sm")]
    DirectSm,
    #[serde(rename = "LOF")]
    Lof,
    IsolationForest,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 10] = [
        BaselineKind::DegreeCentrality,
        BaselineKind::EigenvectorCentrality,
        BaselineKind::ClosenessCentrality,
        BaselineKind::BetweennessCentrality,
        BaselineKind::GhfRe,
        BaselineKind::GhfSm,
        BaselineKind::DirectRe,
        BaselineKind::DirectSm,
        BaselineKind::Lof,
        BaselineKind::IsolationForest,
    ];

    pub const CENTRALITIES: [BaselineKind; 4] = [
        BaselineKind::DegreeCentrality,
        BaselineKind::EigenvectorCentrality,
        BaselineKind::ClosenessCentrality,
        BaselineKind::BetweennessCentrality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::DegreeCentrality => "DegreeCentrality",
            BaselineKind::EigenvectorCentrality => "EigenvectorCentrality",
            BaselineKind::ClosenessCentrality => "ClosenessCentrality",
            BaselineKind::BetweennessCentrality => "BetweennessCentrality",
            BaselineKind::GhfRe => "GHF_RE",
            BaselineKind::GhfSm => "GHF_Sm",
            BaselineKind::DirectRe => "DirectF_RE",
            BaselineKind::DirectSm => "DirectF_Sm",
            BaselineKind::Lof => "LOF",
            BaselineKind::IsolationForest => "IsolationForest",
        }
    }

    pub fn uses_graph(self) -> bool {
        !matches!(self, BaselineKind::Lof | BaselineKind::IsolationForest)
    }

    pub fn uses_signals(self) -> bool {
        !Self::CENTRALITIES.contains(&self)
    }

    /// Whether the method has an `α` to tune.
    pub fn uses_alpha(self) -> bool {
        matches!(
            self,
            BaselineKind::GhfRe | BaselineKind::GhfSm | BaselineKind::DirectRe | BaselineKind::DirectSm
        )
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace(['-', '_'], "");
        let kind = match key.as_str() {
            "degree" | "degreecentrality" => BaselineKind::DegreeCentrality,
            "eigenvector" | "eigenvectorcentrality" => BaselineKind::EigenvectorCentrality,
            "closeness" | "closenesscentrality" => BaselineKind::ClosenessCentrality,
            "betweenness" | "betweennesscentrality" => BaselineKind::BetweennessCentrality,
            "ghfre" => BaselineKind::GhfRe,
            "ghfsm" => BaselineKind::GhfSm,
            "directfre" | "directre" => BaselineKind::DirectRe,
            "directfsm" | "directsm" => BaselineKind::DirectSm,
            "lof" => BaselineKind::Lof,
            "isolationforest" | "iforest" => BaselineKind::IsolationForest,
            _ => {
                let names: Vec<&str> = BaselineKind::ALL.iter().map(|k| k.name()).collect();
                return Err(Error::invalid(
                    "method",
                    format!("unknown baseline `{s}`; expected one of {}", names.join(", ")),
                ));
            }
        };
        Ok(kind)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineParams {
    /// Sparsity weight for direct recovery; also sets GHF's `ξ = 2/α`, `β = 1`.
    pub alpha: f64,
    pub lof_neighbors: usize,
    pub n_trees: usize,
    pub seed: u64,
    pub direct: DirectConfig,
}

impl Default for BaselineParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            lof_neighbors: lof::DEFAULT_NEIGHBORS,
            n_trees: iforest::DEFAULT_TREES,
            seed: 0,
            direct: DirectConfig::default(),
        }
    }
}

/// Runs one baseline. `decomp` must be the eigenbasis of `g`'s normalized
/// Laplacian.
pub fn run_baseline(
    kind: BaselineKind,
    g: &Graph,
    decomp: &SpectralDecomposition,
    f: &SignalMatrix,
    params: &BaselineParams,
) -> Result<HubScores> {
    if f.nrows() != g.n_nodes() {
        return Err(Error::DimensionMismatch {
            context: "signal rows vs graph nodes",
            expected: g.n_nodes(),
            found: f.nrows(),
        });
    }
    match kind {
        BaselineKind::DegreeCentrality => Ok(degree_centrality(g)),
        BaselineKind::EigenvectorCentrality => eigenvector_centrality(g, params.seed),
        BaselineKind::ClosenessCentrality => Ok(closeness_centrality(g)),
        BaselineKind::BetweennessCentrality => Ok(betweenness_centrality(g)),
        BaselineKind::GhfRe | BaselineKind::GhfSm => {
            let (beta, xi) = smoothing::ghf_params_for_alpha(params.alpha);
            let filtered = ghf_filter(decomp, f, beta, xi)?;
            score_pair(kind == BaselineKind::GhfRe, g, f, &filtered)
        }
        BaselineKind::DirectRe | BaselineKind::DirectSm => {
            let filtered = direct_f_recovery(decomp, f, params.alpha, &params.direct)?;
            score_pair(kind == BaselineKind::DirectRe, g, f, &filtered)
        }
        BaselineKind::Lof => lof_scores(f, params.lof_neighbors),
        BaselineKind::IsolationForest => isolation_forest_scores(f, params.n_trees, params.seed),
    }
}

fn score_pair(reconstruction: bool, g: &Graph, f: &SignalMatrix, filtered: &SignalMatrix) -> Result<HubScores> {
    if reconstruction {
        score_reconstruction(f, filtered)
    } else {
        score_smoothness(g, f, filtered)
    }
}
