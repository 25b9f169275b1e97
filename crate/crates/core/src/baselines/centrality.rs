//! Topology-only hub scores. Path lengths use `1 / weight`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{stream_rng, Stream};
use crate::scoring::{HubScores, ScoreMetric};

const POWER_TOL: f64 = 1e-10;
const POWER_MAX_ITER: usize = 100_000;
const PATH_EPS: f64 = 1e-12;

/// Weighted degree (strength).
pub fn degree_centrality(g: &Graph) -> HubScores {
    HubScores::new(ScoreMetric::DegreeCentrality, g.degrees())
}

/// Principal eigenvector of `A`, nonnegative with unit 2-norm.
///
/// Power iteration runs on `A + I`, which has the same eigenvectors but
/// no `±ρ` tie on bipartite graphs. The start vector is positive and
/// seeded; on disconnected graphs the component with the largest spectral
/// radius dominates.
pub fn eigenvector_centrality(g: &Graph, seed: u64) -> Result<HubScores> {
    let n = g.n_nodes();
    if g.edge_count() == 0 {
        let uniform = 1.0 / (n as f64).sqrt();
        return Ok(HubScores::new(ScoreMetric::EigenvectorCentrality, vec![uniform; n]));
    }
    let mut rng = stream_rng(seed, Stream::Centrality);
    let mut x: Vec<f64> = (0..n).map(|_| 0.5 + rng.random::<f64>()).collect();
    normalize(&mut x);
    let mut next = vec![0.0; n];
    for _ in 0..POWER_MAX_ITER {
        for (i, out) in next.iter_mut().enumerate() {
            *out = x[i] + g.neighbors(i).iter().map(|&(j, w)| w * x[j]).sum::<f64>();
        }
        normalize(&mut next);
        let change: f64 = next.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        std::mem::swap(&mut x, &mut next);
        if change < POWER_TOL {
            return Ok(HubScores::new(ScoreMetric::EigenvectorCentrality, x));
        }
    }
    Err(Error::NotConverged {
        what: "eigenvector centrality",
        iterations: POWER_MAX_ITER,
    })
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Frontier {
    dist: f64,
    node: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source shortest path lengths (`∞` when unreachable).
pub fn shortest_paths_from(g: &Graph, source: usize) -> Vec<f64> {
    let n = g.n_nodes();
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Frontier { dist: 0.0, node: source });
    while let Some(Frontier { dist: d, node: u }) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in g.neighbors(u) {
            let nd = d + 1.0 / w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Frontier { dist: nd, node: v });
            }
        }
    }
    dist
}

/// `(r / Σ_j d_ij) · (r / (N − 1))` with `r` the number of nodes reachable
/// from `i`; equals `(N − 1) / Σ_j d_ij` on connected graphs.
pub fn closeness_centrality(g: &Graph) -> HubScores {
    let n = g.n_nodes();
    let scores = (0..n)
        .map(|i| {
            let dist = shortest_paths_from(g, i);
            let (reach, total) = dist
                .iter()
                .enumerate()
                .filter(|&(j, d)| j != i && d.is_finite())
                .fold((0usize, 0.0), |(r, t), (_, &d)| (r + 1, t + d));
            if reach == 0 || total == 0.0 || n < 2 {
                0.0
            } else {
                let r = reach as f64;
                (r / total) * (r / (n - 1) as f64)
            }
        })
        .collect();
    HubScores::new(ScoreMetric::ClosenessCentrality, scores)
}

/// Brandes' algorithm on weighted shortest paths; unnormalized counts over
/// unordered pairs, endpoints excluded.
pub fn betweenness_centrality(g: &Graph) -> HubScores {
    let n = g.n_nodes();
    let mut centrality = vec![0.0; n];
    let mut sigma = vec![0.0; n];
    let mut dist = vec![f64::INFINITY; n];
    let mut delta = vec![0.0; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut stack = Vec::with_capacity(n);
    let mut heap = BinaryHeap::new();

    for s in 0..n {
        stack.clear();
        for v in 0..n {
            preds[v].clear();
            sigma[v] = 0.0;
            dist[v] = f64::INFINITY;
            delta[v] = 0.0;
        }
        sigma[s] = 1.0;
        dist[s] = 0.0;
        heap.push(Frontier { dist: 0.0, node: s });
        let mut settled = vec![false; n];
        while let Some(Frontier { dist: d, node: u }) = heap.pop() {
            if settled[u] || d > dist[u] {
                continue;
            }
            settled[u] = true;
            stack.push(u);
            for &(v, w) in g.neighbors(u) {
                let nd = d + 1.0 / w;
                let tol = PATH_EPS * nd.max(1.0);
                if nd < dist[v] - tol {
                    dist[v] = nd;
                    sigma[v] = sigma[u];
                    preds[v].clear();
                    preds[v].push(u);
                    heap.push(Frontier { dist: nd, node: v });
                } else if (nd - dist[v]).abs() <= tol && !settled[v] {
                    sigma[v] += sigma[u];
                    preds[v].push(u);
                }
            }
        }
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                centrality[w] += delta[w];
            }
        }
    }
    // Each unordered pair was counted from both endpoints.
    centrality.iter_mut().for_each(|c| *c /= 2.0);
    HubScores::new(ScoreMetric::BetweennessCentrality, centrality)
}
