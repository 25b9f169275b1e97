//! Louvain community detection and the participation coefficient.

use std::collections::HashMap;


use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{derive_seed, stream_rng, Stream};

const GAIN_EPS: f64 = 1e-12;
const MAX_SWEEPS: usize = 1000;

/// Weighted graph at one Louvain level. `self_loops[c]` holds
/// `Σ_{i,j ∈ c} A_ij` for an aggregated node.
struct LevelGraph {
    neighbors: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
    strength: Vec<f64>,
}

impl LevelGraph {
    fn from_graph(g: &Graph) -> Self {
        let neighbors: Vec<Vec<(usize, f64)>> = (0..g.n_nodes()).map(|i| g.neighbors(i).to_vec()).collect();
        let strength = g.degrees();
        Self {
            self_loops: vec![0.0; neighbors.len()],
            neighbors,
            strength,
        }
    }

    fn len(&self) -> usize {
        self.neighbors.len()
    }

    fn aggregate(&self, comm: &[usize], n_comm: usize) -> Self {
        let mut self_loops = vec![0.0; n_comm];
        let mut strength = vec![0.0; n_comm];
        let mut links: Vec<HashMap<usize, f64>> = vec![HashMap::new(); n_comm];
        for i in 0..self.len() {
            let ci = comm[i];
            self_loops[ci] += self.self_loops[i];
            strength[ci] += self.strength[i];
            for &(j, w) in &self.neighbors[i] {
                let cj = comm[j];
                if ci == cj {
                    self_loops[ci] += w;
                } else {
                    *links[ci].entry(cj).or_insert(0.0) += w;
                }
            }
        }
        let neighbors = links
            .into_iter()
            .map(|m| {
                let mut v: Vec<(usize, f64)> = m.into_iter().collect();
                v.sort_unstable_by_key(|&(c, _)| c);
                v
            })
            .collect();
        Self {
            neighbors,
            self_loops,
            strength,
        }
    }
}

/// One local-moving phase. Returns community ids (dense, by first
/// appearance) and whether any node moved.
fn local_moving(level: &LevelGraph, m2: f64, rng: &mut impl rand::Rng) -> (Vec<usize>, bool) {
    let n = level.len();
    let mut comm: Vec<usize> = (0..n).collect();
    let mut tot = level.strength.clone();
    let mut weight_to = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut moved_any = false;

    for _ in 0..MAX_SWEEPS {
        let mut moved = false;
        for i in 0..n {
            let ci = comm[i];
            let ki = level.strength[i];
            touched.clear();
            for &(j, w) in &level.neighbors[i] {
                let cj = comm[j];
                if weight_to[cj] == 0.0 {
                    touched.push(cj);
                }
                weight_to[cj] += w;
            }
            tot[ci] -= ki;
            let gain = |c: usize, w: f64| w - tot[c] * ki / m2;
            let own_gain = gain(ci, weight_to[ci]);
            let mut best_gain = own_gain;
            let mut ties: Vec<usize> = Vec::new();
            for &c in &touched {
                if c == ci {
                    continue;
                }
                let g = gain(c, weight_to[c]);
                if g > best_gain + GAIN_EPS {
                    best_gain = g;
                    ties.clear();
                    ties.push(c);
                } else if !ties.is_empty() && (g - best_gain).abs() <= GAIN_EPS {
                    ties.push(c);
                }
            }
            let target = match ties.len() {
                0 => ci,
                1 => ties[0],
                k => ties[rng.random_range(0..k)],
            };
            tot[target] += ki;
            comm[i] = target;
            if target != ci {
                moved = true;
                moved_any = true;
            }
            for &c in &touched {
                weight_to[c] = 0.0;
            }
        }
        if !moved {
            break;
        }
    }
    let (dense, _) = renumber(&comm);
    (dense, moved_any)
}

/// Relabels to `0..k` in order of first appearance.
fn renumber(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map: HashMap<usize, usize> = HashMap::new();
    let out = labels
        .iter()
        .map(|&c| {
            let next = map.len();
            *map.entry(c).or_insert(next)
        })
        .collect();
    (out, map.len())
}

/// Louvain modularity optimization (resolution 1) with ascending node
/// sweeps; ties between equally good moves are broken by a seeded draw.
/// Labels are `0..N_M`, numbered by first appearance in node order.
pub fn louvain_communities(g: &Graph, seed: u64) -> Vec<usize> {
    let n = g.n_nodes();
    let mut level = LevelGraph::from_graph(g);
    let m2: f64 = level.strength.iter().sum();
    if m2 == 0.0 {
        return (0..n).collect();
    }
    let mut rng = stream_rng(seed, Stream::Community);
    let mut membership: Vec<usize> = (0..n).collect();
    loop {
        let (comm, moved) = local_moving(&level, m2, &mut rng);
        if !moved {
            break;
        }
        for m in membership.iter_mut() {
            *m = comm[*m];
        }
        let n_comm = comm.iter().max().map_or(0, |&c| c + 1);
        if n_comm == level.len() {
            break;
        }
        level = level.aggregate(&comm, n_comm);
    }
    renumber(&membership).0
}

/// Best of `restarts` Louvain runs by modularity; the first run wins ties.
pub fn louvain_with_restarts(g: &Graph, seed: u64, restarts: usize) -> Vec<usize> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    for r in 0..restarts.max(1) {
        let run_seed = if r == 0 { seed } else { derive_seed(seed, &[r as u64]) };
        let labels = louvain_communities(g, run_seed);
        let q = modularity(g, &labels);
        if best.as_ref().is_none_or(|(bq, _)| q > *bq) {
            best = Some((q, labels));
        }
    }
    best.map(|(_, l)| l).unwrap_or_default()
}

/// Newman modularity `Σ_c [Σ_in,c / 2m − (tot_c / 2m)²]`; 0 for an
/// edgeless graph.
pub fn modularity(g: &Graph, labels: &[usize]) -> f64 {
    let deg = g.degrees();
    let m2: f64 = deg.iter().sum();
    if m2 == 0.0 {
        return 0.0;
    }
    let n_comm = labels.iter().max().map_or(0, |&c| c + 1);
    let mut inside = vec![0.0; n_comm];
    let mut tot = vec![0.0; n_comm];
    for i in 0..g.n_nodes() {
        tot[labels[i]] += deg[i];
        for &(j, w) in g.neighbors(i) {
            if labels[j] == labels[i] {
                inside[labels[i]] += w;
            }
        }
    }
    inside
        .iter()
        .zip(&tot)
        .map(|(&a, &t)| a / m2 - (t / m2) * (t / m2))
        .sum()
}

/// `P_i = 1 − Σ_s (k_is / k_i)²` over communities `s`; 0 for isolated nodes.
pub fn participation_coefficient(g: &Graph, labels: &[usize]) -> Result<Vec<f64>> {
    if labels.len() != g.n_nodes() {
        return Err(Error::DimensionMismatch {
            context: "community labels vs graph nodes",
            expected: g.n_nodes(),
            found: labels.len(),
        });
    }
    let mut per_comm: HashMap<usize, f64> = HashMap::new();
    Ok((0..g.n_nodes())
        .map(|i| {
            per_comm.clear();
            let mut k = 0.0;
            for &(j, w) in g.neighbors(i) {
                *per_comm.entry(labels[j]).or_insert(0.0) += w;
                k += w;
            }
            if k == 0.0 {
                return 0.0;
            }
            let concentration: f64 = per_comm.values().map(|&kis| (kis / k) * (kis / k)).sum();
            (1.0 - concentration).max(0.0)
        })
        .collect())
}
