//! Weighted undirected graphs and the normalized Laplacian.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative tolerance used when checking adjacency symmetry.
const SYMMETRY_TOL: f64 = 1e-12;

/// A weighted undirected graph on nodes `0..n`.
///
/// The dense adjacency matrix is the source of truth; neighbor lists are
/// derived from it once at construction for the path-based algorithms.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adjacency: DMatrix<f64>,
    neighbors: Vec<Vec<(usize, f64)>>,
}

impl Graph {
    /// Validates and wraps a dense adjacency matrix.
    ///
    /// Rejects non-square, non-symmetric, negative, non-finite, or
    /// self-loop entries.
    pub fn from_adjacency(adjacency: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = adjacency.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::invalid("n_nodes", "graph must have at least one node"));
        }
        for i in 0..rows {
            for j in i..rows {
                let a = adjacency[(i, j)];
                let b = adjacency[(j, i)];
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::NonFinite("adjacency"));
                }
                if i == j {
                    if a != 0.0 {
                        return Err(Error::SelfLoop { node: i, weight: a });
                    }
                    continue;
                }
                if a < 0.0 {
                    return Err(Error::NegativeWeight { i, j, weight: a });
                }
                if b < 0.0 {
                    return Err(Error::NegativeWeight { i: j, j: i, weight: b });
                }
                if (a - b).abs() > SYMMETRY_TOL * a.abs().max(b.abs()).max(1.0) {
                    return Err(Error::NotSymmetric { i, j, a, b });
                }
            }
        }
        // Exact symmetry from here on.
        let mut adjacency = adjacency;
        for i in 0..rows {
            for j in (i + 1)..rows {
                adjacency[(j, i)] = adjacency[(i, j)];
            }
        }
        let neighbors = build_neighbors(&adjacency);
        Ok(Self {
            adjacency,
            neighbors,
        })
    }

    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Result<Self> {
        Self::from_adjacency(DMatrix::zeros(n, n))
    }

    /// Builds a graph from an undirected edge list. Each unordered pair may
    /// appear at most once; weights must be nonnegative and finite.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n_nodes", "graph must have at least one node"));
        }
        let mut adjacency = DMatrix::zeros(n, n);
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for &(src, dst, weight) in edges {
            for node in [src, dst] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, n_nodes: n });
                }
            }
            if src == dst {
                return Err(Error::SelfLoop { node: src, weight });
            }
            if !weight.is_finite() {
                return Err(Error::NonFinite("edge weight"));
            }
            if weight < 0.0 {
                return Err(Error::NegativeWeight { i: src, j: dst, weight });
            }
            if !seen.insert((src.min(dst), src.max(dst))) {
                return Err(Error::DuplicateEdge { src, dst });
            }
            adjacency[(src, dst)] = weight;
            adjacency[(dst, src)] = weight;
        }
        Self::from_adjacency(adjacency)
    }

    pub fn n_nodes(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.adjacency[(i, j)]
    }

    /// Neighbors of `i` with strictly positive edge weight, ascending by id.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.neighbors[i]
    }

    /// Weighted degree (strength) of every node.
    pub fn degrees(&self) -> Vec<f64> {
        self.neighbors
            .iter()
            .map(|nbrs| nbrs.iter().map(|&(_, w)| w).sum())
            .collect()
    }

    /// Number of undirected edges with positive weight.
    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Undirected edges `(i, j, w)` with `i < j`, in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (i, nbrs) in self.neighbors.iter().enumerate() {
            out.extend(nbrs.iter().filter(|&&(j, _)| j > i).map(|&(j, w)| (i, j, w)));
        }
        out
    }

    /// The graph with node `node` and its incident edges removed; remaining
    /// nodes keep their relative order.
    pub fn without_node(&self, node: usize) -> Result<Graph> {
        let n = self.n_nodes();
        if node >= n {
            return Err(Error::NodeOutOfRange { node, n_nodes: n });
        }
        let keep: Vec<usize> = (0..n).filter(|&i| i != node).collect();
        let adjacency = DMatrix::from_fn(n - 1, n - 1, |r, c| self.adjacency[(keep[r], keep[c])]);
        Graph::from_adjacency(adjacency)
    }

    /// Relabels nodes: node `i` of `self` becomes node `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph> {
        let n = self.n_nodes();
        if perm.len() != n {
            return Err(Error::DimensionMismatch {
                context: "node permutation",
                expected: n,
                found: perm.len(),
            });
        }
        let mut adjacency = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                adjacency[(perm[i], perm[j])] = self.adjacency[(i, j)];
            }
        }
        Graph::from_adjacency(adjacency)
    }
}

fn build_neighbors(adjacency: &DMatrix<f64>) -> Vec<Vec<(usize, f64)>> {
    let n = adjacency.nrows();
    (0..n)
        .map(|i| {
            (0..n)
                .filter_map(|j| {
                    let w = adjacency[(i, j)];
                    (w > 0.0).then_some((j, w))
                })
                .collect()
        })
        .collect()
}

/// `I - D^{-1/2} A D^{-1/2}`.
///
/// Isolated nodes get `D^{-1/2} = 0`, so their row and column equal the
/// identity row.
pub fn normalized_laplacian(g: &Graph) -> DMatrix<f64> {
    let n = g.n_nodes();
    let inv_sqrt: Vec<f64> = g
        .degrees()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
        .collect();
    let mut lap = DMatrix::identity(n, n);
    for (i, nbrs) in g.neighbors.iter().enumerate() {
        for &(j, w) in nbrs {
            lap[(i, j)] = -w * inv_sqrt[i] * inv_sqrt[j];
        }
    }
    lap
}
