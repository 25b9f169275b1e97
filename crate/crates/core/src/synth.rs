//! Synthetic benchmark instances: random graphs, Tikhonov-smooth node
//! signals, and injected hub nodes with ground-truth labels.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{stream_rng, Stream};
use crate::spectral::{SignalMatrix, SpectralDecomposition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GraphModel {
    /// Erdős–Rényi graph, hubs chosen uniformly at random.
    #[serde(rename = "ER")]
    Er,
    /// Barabási–Albert graph, hubs are the highest-degree nodes.
    #[serde(rename = "BAdegree")]
    BaDegree,
    /// Barabási–Albert graph, half the hubs top-degree and half random.
    #[serde(rename = "BAMixed")]
    BaMixed,
}

impl GraphModel {
    pub const ALL: [GraphModel; 3] = [GraphModel::Er, GraphModel::BaDegree, GraphModel::BaMixed];

    pub fn name(self) -> &'static str {
        match self {
            GraphModel::Er => "ER",
            GraphModel::BaDegree => "BAdegree",
            GraphModel::BaMixed => "BAMixed",
        }
    }
}

impl fmt::Display for GraphModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GraphModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "er" => Ok(GraphModel::Er),
            "badegree" | "ba-degree" => Ok(GraphModel::BaDegree),
            "bamixed" | "ba-mixed" => Ok(GraphModel::BaMixed),
            _ => Err(Error::invalid("model", format!("unknown graph model `{s}` (ER, BAdegree, BAMixed)"))),
        }
    }
}

/// How the hub-noise scale σ is measured on the clean signals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SigmaMode {
    /// Population standard deviation of the per-node row norms `‖X_i‖₂`.
    #[default]
    RowNorm,
    /// Per observation: population standard deviation of the entries of
    /// column `p`, used for the noise added to that column.
    ColumnEntries,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub model: GraphModel,
    pub n_nodes: usize,
    pub er_p: f64,
    pub ba_m: usize,
    pub n_signals: usize,
    pub gamma: f64,
    pub hub_fraction: f64,
    pub hub_strength: f64,
    pub seed: u64,
    pub sigma_mode: SigmaMode,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            model: GraphModel::Er,
            n_nodes: 1000,
            er_p: 0.1,
            ba_m: 3,
            n_signals: 100,
            gamma: 30.0,
            hub_fraction: 0.1,
            hub_strength: 2.0,
            seed: 0,
            sigma_mode: SigmaMode::RowNorm,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_nodes < 2 {
            return Err(Error::invalid("n_nodes", "must be at least 2"));
        }
        if !(self.er_p > 0.0 && self.er_p <= 1.0) {
            return Err(Error::invalid("er_p", format!("must lie in (0, 1], got {}", self.er_p)));
        }
        if self.ba_m < 1 {
            return Err(Error::invalid("ba_m", "must be at least 1"));
        }
        if self.model != GraphModel::Er && self.n_nodes <= self.ba_m {
            return Err(Error::invalid("n_nodes", "must exceed ba_m for Barabási–Albert graphs"));
        }
        if self.n_signals < 1 {
            return Err(Error::invalid("n_signals", "must be at least 1"));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::invalid("gamma", format!("must be finite and >= 0, got {}", self.gamma)));
        }
        if !(self.hub_strength >= 0.0 && self.hub_strength.is_finite()) {
            return Err(Error::invalid(
                "hub_strength",
                format!("must be finite and >= 0, got {}", self.hub_strength),
            ));
        }
        hub_count(self.n_nodes, self.hub_fraction)?;
        Ok(())
    }
}

/// Number of hubs, `round(fraction · n)`; must leave both classes nonempty.
pub fn hub_count(n: usize, fraction: f64) -> Result<usize> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid("hub_fraction", format!("must lie in (0, 1), got {fraction}")));
    }
    let k = (fraction * n as f64).round() as usize;
    if k == 0 || k >= n {
        return Err(Error::invalid(
            "hub_fraction",
            format!("{fraction} of {n} nodes gives {k} hubs; need between 1 and {}", n - 1),
        ));
    }
    Ok(k)
}

/// A generated benchmark instance.
#[derive(Debug, Clone)]
pub struct SynthInstance {
    pub graph: Graph,
    /// Signals with hub noise injected.
    pub signals: SignalMatrix,
    /// Signals before injection.
    pub clean_signals: SignalMatrix,
    pub hub_labels: Vec<bool>,
}

impl SynthInstance {
    pub fn hub_nodes(&self) -> Vec<usize> {
        self.hub_labels
            .iter()
            .enumerate()
            .filter_map(|(i, &h)| h.then_some(i))
            .collect()
    }
}

/// Erdős–Rényi graph with unit weights: each unordered pair is an edge
/// independently with probability `p`.
pub fn generate_er(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::invalid("er_p", format!("must lie in (0, 1], got {p}")));
    }
    let mut rng = stream_rng(seed, Stream::Graph);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((i, j, 1.0));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Barabási–Albert graph with unit weights.
///
/// Starts from a clique on `m + 1` nodes; every later node attaches to `m`
/// distinct existing nodes picked with probability proportional to their
/// current degree.
pub fn generate_ba(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if m < 1 {
        return Err(Error::invalid("ba_m", "must be at least 1"));
    }
    if n <= m {
        return Err(Error::invalid("n_nodes", format!("must exceed ba_m = {m}, got {n}")));
    }
    let mut rng = stream_rng(seed, Stream::Graph);
    let mut edges = Vec::with_capacity(m * (m + 1) / 2 + (n - m - 1) * m);
    // Every edge endpoint appears once, so a uniform draw from this list is
    // a degree-proportional draw over nodes.
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * edges.capacity());
    for i in 0..=m {
        for j in (i + 1)..=m {
            edges.push((i, j, 1.0));
            endpoints.push(i);
            endpoints.push(j);
        }
    }
    let mut targets = Vec::with_capacity(m);
    for v in (m + 1)..n {
        targets.clear();
        while targets.len() < m {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t, v, 1.0));
            endpoints.push(t);
            endpoints.push(v);
        }
    }
    Graph::from_edges(n, &edges)
}

/// Draws `P` columns `x_0 ~ N(0, I)` and smooths each as
/// `(γ L_n + I)^{-1} x_0` in the Laplacian eigenbasis.
pub fn generate_smooth_signals(
    decomp: &SpectralDecomposition,
    n_signals: usize,
    gamma: f64,
    seed: u64,
) -> Result<SignalMatrix> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::invalid("gamma", format!("must be finite and >= 0, got {gamma}")));
    }
    let white = white_noise(decomp.n(), n_signals, seed);
    if gamma == 0.0 {
        return Ok(white);
    }
    let gains: Vec<f64> = decomp
        .eigenvalues()
        .iter()
        .map(|&lam| 1.0 / (gamma * lam + 1.0))
        .collect();
    decomp.apply_gains(&gains, &white)
}

/// The `N(0, I)` draws that [`generate_smooth_signals`] smooths, column by
/// column.
pub fn white_noise(n: usize, n_signals: usize, seed: u64) -> SignalMatrix {
    let mut rng = stream_rng(seed, Stream::Signals);
    let mut x = SignalMatrix::zeros(n, n_signals);
    for p in 0..n_signals {
        for i in 0..n {
            x[(i, p)] = rng.sample(StandardNormal);
        }
    }
    x
}

/// Node ids sorted by descending degree, ties by ascending id.
pub fn degree_order(g: &Graph) -> Vec<usize> {
    let deg = g.degrees();
    let mut order: Vec<usize> = (0..g.n_nodes()).collect();
    order.sort_by(|&a, &b| deg[b].total_cmp(&deg[a]).then(a.cmp(&b)));
    order
}

/// Picks the hub set for a model. The random parts come from one shuffle
/// of the candidates, so larger hub counts extend smaller ones for the same
/// seed.
pub fn select_hubs(g: &Graph, model: GraphModel, n_hubs: usize, seed: u64) -> Vec<usize> {
    let n = g.n_nodes();
    let mut rng = stream_rng(seed, Stream::HubSelection);
    let mut hubs = match model {
        GraphModel::Er => {
            let mut nodes: Vec<usize> = (0..n).collect();
            nodes.shuffle(&mut rng);
            nodes.truncate(n_hubs);
            nodes
        }
        GraphModel::BaDegree => {
            let mut order = degree_order(g);
            order.truncate(n_hubs);
            order
        }
        GraphModel::BaMixed => {
            let n_top = n_hubs.div_ceil(2);
            let order = degree_order(g);
            let mut hubs = order[..n_top].to_vec();
            let mut rest = order[n_top..].to_vec();
            rest.sort_unstable();
            rest.shuffle(&mut rng);
            hubs.extend_from_slice(&rest[..n_hubs - n_top]);
            hubs
        }
    };
    hubs.sort_unstable();
    hubs
}

/// Population standard deviation.
pub(crate) fn population_std(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let (count, sum) = values.clone().fold((0usize, 0.0), |(c, s), v| (c + 1, s + v));
    if count == 0 {
        return 0.0;
    }
    let mean = sum / count as f64;
    (values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / count as f64).sqrt()
}

/// Adds `uniform(-uσ, uσ)` noise to every entry of the hub rows.
pub fn inject_hubs(
    g: &Graph,
    clean: &SignalMatrix,
    model: GraphModel,
    hub_fraction: f64,
    strength: f64,
    sigma_mode: SigmaMode,
    seed: u64,
) -> Result<SynthInstance> {
    let n = g.n_nodes();
    if clean.nrows() != n {
        return Err(Error::DimensionMismatch {
            context: "signal rows vs graph nodes",
            expected: n,
            found: clean.nrows(),
        });
    }
    if !(strength >= 0.0 && strength.is_finite()) {
        return Err(Error::invalid("hub_strength", format!("must be finite and >= 0, got {strength}")));
    }
    let k = hub_count(n, hub_fraction)?;
    let hubs = select_hubs(g, model, k, seed);

    let column_scale: Vec<f64> = match sigma_mode {
        SigmaMode::RowNorm => {
            let sigma = population_std(clean.row_iter().map(|r| r.norm()));
            vec![strength * sigma; clean.ncols()]
        }
        SigmaMode::ColumnEntries => clean
            .column_iter()
            .map(|c| strength * population_std(c.iter().copied()))
            .collect(),
    };

    let mut rng = stream_rng(seed, Stream::Noise);
    let mut signals = clean.clone();
    let mut hub_labels = vec![false; n];
    for &i in &hubs {
        hub_labels[i] = true;
        for (p, &scale) in column_scale.iter().enumerate() {
            let r: f64 = rng.random();
            signals[(i, p)] += scale * (2.0 * r - 1.0);
        }
    }
    Ok(SynthInstance {
        graph: g.clone(),
        signals,
        clean_signals: clean.clone(),
        hub_labels,
    })
}

/// Generates a full instance; also returns the Laplacian eigenbasis, which
/// every detector downstream needs.
pub fn generate_with_spectrum(cfg: &SynthConfig) -> Result<(SynthInstance, SpectralDecomposition)> {
    cfg.validate()?;
    let graph = match cfg.model {
        GraphModel::Er => generate_er(cfg.n_nodes, cfg.er_p, cfg.seed)?,
        GraphModel::BaDegree | GraphModel::BaMixed => generate_ba(cfg.n_nodes, cfg.ba_m, cfg.seed)?,
    };
    let decomp = SpectralDecomposition::of_graph(&graph)?;
    let clean = generate_smooth_signals(&decomp, cfg.n_signals, cfg.gamma, cfg.seed)?;
    let instance = inject_hubs(
        &graph,
        &clean,
        cfg.model,
        cfg.hub_fraction,
        cfg.hub_strength,
        cfg.sigma_mode,
        cfg.seed,
    )?;
    Ok((instance, decomp))
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthInstance> {
    generate_with_spectrum(cfg).map(|(instance, _)| instance)
}
