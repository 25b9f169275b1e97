//! Synthetic benchmark: hub strength sweep (experiment 1) and hub fraction
//! sweep (experiment 2).
//!
//! Each run `r` of model `m` draws its seed from `(master, m, r)` only, so
//! within a run every x value shares the graph, the clean signals and the
//! noise pattern (common random numbers). Runs execute in parallel and are
//! merged in key order, so results do not depend on the thread count.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::smoothing::ghf_params_for_alpha;
use crate::baselines::{direct_f_recovery, ghf_filter, run_baseline, BaselineKind, BaselineParams, DirectConfig};
use crate::error::{Error, Result};
use crate::eval::metrics::auc_roc;
use crate::grafhub::{GrafhubConfig, GrafhubProblem};
use crate::rng::derive_seed;
use crate::scoring::{score_reconstruction, score_smoothness, HubScores};
use crate::spectral::SignalMatrix;
use crate::synth::{generate_with_spectrum, GraphModel, SynthConfig};

/// `α` values searched for the learned and smoothing methods.
pub const DEFAULT_ALPHA_GRID: [f64; 12] = [0.01, 0.02, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0];
pub const DEFAULT_ORDER_GRID: [usize; 5] = [2, 3, 4, 5, 6];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    GrafhubRe,
    GrafhubSm,
    Baseline(BaselineKind),
}

impl Method {
    pub fn all() -> Vec<Method> {
        let mut out = vec![Method::GrafhubRe, Method::GrafhubSm];
        out.extend(BaselineKind::ALL.iter().map(|&k| Method::Baseline(k)));
        out
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::GrafhubRe => "GraFHub_RE",
            Method::GrafhubSm => "GraFHub_Sm",
            Method::Baseline(k) => k.name(),
        }
    }

    pub fn is_grafhub(self) -> bool {
        matches!(self, Method::GrafhubRe | Method::GrafhubSm)
    }

    fn uses_alpha(self) -> bool {
        match self {
            Method::GrafhubRe | Method::GrafhubSm => true,
            Method::Baseline(k) => k.uses_alpha(),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "grafhubre" => Ok(Method::GrafhubRe),
            "grafhubsm" => Ok(Method::GrafhubSm),
            _ => s.parse().map(Method::Baseline),
        }
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Experiment {
    /// Sweep the hub strength `u` at the base hub fraction.
    #[serde(rename = "1")]
    HubStrength,
    /// Sweep the hub fraction at the base hub strength.
    #[serde(rename = "2")]
    HubFraction,
}

impl Experiment {
    pub fn number(self) -> u8 {
        match self {
            Experiment::HubStrength => 1,
            Experiment::HubFraction => 2,
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Experiment::HubStrength),
            2 => Ok(Experiment::HubFraction),
            _ => Err(Error::invalid("experiment", format!("must be 1 or 2, got {n}"))),
        }
    }

    pub fn x_name(self) -> &'static str {
        match self {
            Experiment::HubStrength => "u",
            Experiment::HubFraction => "hub_fraction",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentGrid {
    pub models: Vec<GraphModel>,
    pub u_values: Vec<f64>,
    pub hub_fractions: Vec<f64>,
    pub methods: Vec<Method>,
    pub n_runs: usize,
    /// Shared instance settings; `model`, `seed` and the swept quantity are
    /// overridden per cell.
    pub base: SynthConfig,
    pub alpha_grid: Vec<f64>,
    pub order_grid: Vec<usize>,
    /// Solver settings other than `α`, order and seed.
    pub grafhub: GrafhubConfig,
    pub lof_neighbors: usize,
    pub n_trees: usize,
    pub seed: u64,
}

impl Default for ExperimentGrid {
    fn default() -> Self {
        Self::full()
    }
}

impl ExperimentGrid {
    /// Full-scale settings: N = 1000, P = 100, 50 runs, every method.
    pub fn full() -> Self {
        Self {
            models: GraphModel::ALL.to_vec(),
            u_values: vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            hub_fractions: vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7],
            methods: Method::all(),
            n_runs: 50,
            base: SynthConfig::default(),
            alpha_grid: DEFAULT_ALPHA_GRID.to_vec(),
            order_grid: DEFAULT_ORDER_GRID.to_vec(),
            grafhub: GrafhubConfig::default(),
            lof_neighbors: crate::baselines::lof::DEFAULT_NEIGHBORS,
            n_trees: crate::baselines::iforest::DEFAULT_TREES,
            seed: 0,
        }
    }

    /// Laptop-scale settings: N = 200, P = 50.
    pub fn desk() -> Self {
        let mut grid = Self::full();
        grid.base.n_nodes = 200;
        grid.base.n_signals = 50;
        grid.u_values = vec![1.0, 2.0, 4.0, 6.0];
        grid.hub_fractions = vec![0.1, 0.3, 0.5, 0.7];
        grid
    }

    pub fn x_values(&self, experiment: Experiment) -> &[f64] {
        match experiment {
            Experiment::HubStrength => &self.u_values,
            Experiment::HubFraction => &self.hub_fractions,
        }
    }

    pub fn validate(&self, experiment: Experiment) -> Result<()> {
        if self.n_runs < 1 {
            return Err(Error::invalid("n_runs", "must be at least 1"));
        }
        for (name, empty) in [
            ("models", self.models.is_empty()),
            ("methods", self.methods.is_empty()),
            ("alpha_grid", self.alpha_grid.is_empty()),
            ("order_grid", self.order_grid.is_empty()),
        ] {
            if empty {
                return Err(Error::invalid(name, "must not be empty"));
            }
        }
        if self.x_values(experiment).is_empty() {
            let name = match experiment {
                Experiment::HubStrength => "u_values",
                Experiment::HubFraction => "hub_fractions",
            };
            return Err(Error::invalid(name, "must not be empty"));
        }
        if let Some(a) = self.alpha_grid.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return Err(Error::invalid("alpha_grid", format!("values must be positive and finite, got {a}")));
        }
        if let Some(t) = self.order_grid.iter().find(|&&t| t < 2) {
            return Err(Error::invalid("order_grid", format!("orders must be at least 2, got {t}")));
        }
        for &x in self.x_values(experiment) {
            self.cell_config(experiment, self.models[0], x, 0).validate()?;
        }
        let mut probe = self.grafhub.clone();
        probe.filter_order = self.order_grid[0];
        probe.alpha = self.alpha_grid[0];
        probe.validate()
    }

    fn cell_config(&self, experiment: Experiment, model: GraphModel, x: f64, seed: u64) -> SynthConfig {
        let mut cfg = self.base.clone();
        cfg.model = model;
        cfg.seed = seed;
        match experiment {
            Experiment::HubStrength => cfg.hub_strength = x,
            Experiment::HubFraction => cfg.hub_fraction = x,
        }
        cfg
    }

    /// Seed shared by every x value of run `run` on `model`.
    pub fn run_seed(&self, model: GraphModel, run: usize) -> u64 {
        let model_key = GraphModel::ALL.iter().position(|&m| m == model).unwrap_or(0) as u64;
        derive_seed(self.seed, &[model_key, run as u64])
    }

    /// Hyperparameter settings searched for `method`, in grid order.
    pub fn settings(&self, method: Method) -> Vec<Setting> {
        match method {
            Method::GrafhubRe | Method::GrafhubSm => self
                .alpha_grid
                .iter()
                .flat_map(|&a| {
                    self.order_grid.iter().map(move |&t| Setting {
                        alpha: Some(a),
                        order: Some(t),
                    })
                })
                .collect(),
            m if m.uses_alpha() => self
                .alpha_grid
                .iter()
                .map(|&a| Setting {
                    alpha: Some(a),
                    order: None,
                })
                .collect(),
            _ => vec![Setting {
                alpha: None,
                order: None,
            }],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Setting {
    pub alpha: Option<f64>,
    pub order: Option<usize>,
}

/// Aggregate for one (model, method, x value) at the chosen setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub model: GraphModel,
    pub method: Method,
    pub x_value: f64,
    pub mean_auc: f64,
    /// Sample standard deviation over successful runs (0 for a single run).
    pub std_auc: f64,
    /// One entry per run; `None` where the detector failed.
    pub per_run_auc: Vec<Option<f64>>,
    pub run_seeds: Vec<u64>,
    pub chosen: Setting,
    pub n_failed: usize,
    pub failures: Vec<String>,
}

impl CellResult {
    pub fn successful_aucs(&self) -> Vec<f64> {
        self.per_run_auc.iter().flatten().copied().collect()
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        let n = self.successful_aucs().len().max(1) as f64;
        self.std_auc / n.sqrt()
    }
}

/// `sqrt((sd_a² + sd_b²) / n)` with `n` the smaller run count.
pub fn pooled_std_error(a: &CellResult, b: &CellResult) -> f64 {
    let n = a.successful_aucs().len().min(b.successful_aucs().len()).max(1) as f64;
    ((a.std_auc * a.std_auc + b.std_auc * b.std_auc) / n).sqrt()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub experiment: Experiment,
    pub grid: ExperimentGrid,
    pub cells: Vec<CellResult>,
}

impl BenchmarkResult {
    pub fn cell(&self, model: GraphModel, method: Method, x_value: f64) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.model == model && c.method == method && c.x_value == x_value)
    }

    /// Cells of one model and method ordered by x value as in the grid.
    pub fn series(&self, model: GraphModel, method: Method) -> Vec<&CellResult> {
        self.grid
            .x_values(self.experiment)
            .iter()
            .filter_map(|&x| self.cell(model, method, x))
            .collect()
    }
}

type AucResult = std::result::Result<f64, String>;

/// Per-setting AUC of each requested method for one instance.
type RunOutcome = Vec<Vec<AucResult>>;

fn evaluate_instance(
    grid: &ExperimentGrid,
    experiment: Experiment,
    model: GraphModel,
    x: f64,
    run_seed: u64,
) -> std::result::Result<RunOutcome, String> {
    let cfg = grid.cell_config(experiment, model, x, run_seed);
    let (instance, decomp) = generate_with_spectrum(&cfg).map_err(|e| e.to_string())?;
    let labels = &instance.hub_labels;
    let f = &instance.signals;
    let g = &instance.graph;
    let auc = |r: Result<HubScores>| -> AucResult {
        r.and_then(|s| auc_roc(&s.scores, labels)).map_err(|e| e.to_string())
    };

    // Each fit of a smoothing method yields both scorings, so fits are
    // shared between the RE and Sm variants.
    let score_both = |filtered: Result<SignalMatrix>| -> (AucResult, AucResult) {
        match filtered {
            Ok(ft) => (
                auc(score_reconstruction(f, &ft)),
                auc(score_smoothness(g, f, &ft)),
            ),
            Err(e) => (Err(e.to_string()), Err(e.to_string())),
        }
    };
    let wants = |a: Method, b: Method| grid.methods.contains(&a) || grid.methods.contains(&b);
    let split = |pairs: Vec<(AucResult, AucResult)>| -> (Vec<AucResult>, Vec<AucResult>) { pairs.into_iter().unzip() };

    let (grafhub_re, grafhub_sm) = if wants(Method::GrafhubRe, Method::GrafhubSm) {
        let settings = grid.settings(Method::GrafhubRe);
        let max_order = grid.order_grid.iter().copied().max().unwrap_or(2);
        match GrafhubProblem::new(&decomp, f, max_order) {
            Ok(problem) => split(
                settings
                    .iter()
                    .map(|s| {
                        let mut solver = grid.grafhub.clone();
                        solver.alpha = s.alpha.unwrap_or(solver.alpha);
                        solver.filter_order = s.order.unwrap_or(solver.filter_order);
                        solver.seed = run_seed;
                        score_both(problem.fit(&solver).map(|fit| fit.filtered))
                    })
                    .collect(),
            ),
            Err(e) => {
                let failed = vec![Err(e.to_string()); settings.len()];
                (failed.clone(), failed)
            }
        }
    } else {
        Default::default()
    };
    let smoothing_pairs = |re: BaselineKind, sm: BaselineKind, fit: &dyn Fn(f64) -> Result<SignalMatrix>| {
        if wants(Method::Baseline(re), Method::Baseline(sm)) {
            split(grid.alpha_grid.iter().map(|&a| score_both(fit(a))).collect())
        } else {
            Default::default()
        }
    };
    let (ghf_re, ghf_sm) = smoothing_pairs(BaselineKind::GhfRe, BaselineKind::GhfSm, &|a| {
        let (beta, xi) = ghf_params_for_alpha(a);
        ghf_filter(&decomp, f, beta, xi)
    });
    let (direct_re, direct_sm) = smoothing_pairs(BaselineKind::DirectRe, BaselineKind::DirectSm, &|a| {
        direct_f_recovery(&decomp, f, a, &DirectConfig::default())
    });

    let mut out = Vec::with_capacity(grid.methods.len());
    for &method in &grid.methods {
        let aucs = match method {
            Method::GrafhubRe => grafhub_re.clone(),
            Method::GrafhubSm => grafhub_sm.clone(),
            Method::Baseline(BaselineKind::GhfRe) => ghf_re.clone(),
            Method::Baseline(BaselineKind::GhfSm) => ghf_sm.clone(),
            Method::Baseline(BaselineKind::DirectRe) => direct_re.clone(),
            Method::Baseline(BaselineKind::DirectSm) => direct_sm.clone(),
            Method::Baseline(kind) => {
                let params = BaselineParams {
                    lof_neighbors: grid.lof_neighbors,
                    n_trees: grid.n_trees,
                    seed: run_seed,
                    ..BaselineParams::default()
                };
                vec![auc(run_baseline(kind, g, &decomp, f, &params))]
            }
        };
        out.push(aucs);
    }
    Ok(out)
}

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs one experiment over the whole grid.
pub fn run_experiment(grid: &ExperimentGrid, experiment: Experiment) -> Result<BenchmarkResult> {
    grid.validate(experiment)?;
    let xs = grid.x_values(experiment).to_vec();
    let tasks: Vec<(GraphModel, usize, usize)> = grid
        .models
        .iter()
        .flat_map(|&m| (0..xs.len()).flat_map(move |xi| (0..grid.n_runs).map(move |r| (m, xi, r))))
        .collect();
    log::info!(
        "experiment {}: {} instances, {} methods",
        experiment.number(),
        tasks.len(),
        grid.methods.len()
    );
    let outcomes: Vec<std::result::Result<RunOutcome, String>> = tasks
        .par_iter()
        .map(|&(model, xi, run)| evaluate_instance(grid, experiment, model, xs[xi], grid.run_seed(model, run)))
        .collect();

    let mut cells = Vec::new();
    let mut idx = 0;
    for &model in &grid.models {
        for &x in &xs {
            let runs = &outcomes[idx..idx + grid.n_runs];
            idx += grid.n_runs;
            let run_seeds: Vec<u64> = (0..grid.n_runs).map(|r| grid.run_seed(model, r)).collect();
            for (mi, &method) in grid.methods.iter().enumerate() {
                let settings = grid.settings(method);
                let per_setting = |si: usize| -> Vec<std::result::Result<f64, String>> {
                    runs.iter()
                        .map(|o| match o {
                            Ok(v) => v[mi][si].clone(),
                            Err(e) => Err(e.clone()),
                        })
                        .collect()
                };
                // Highest mean AUC wins; ties keep the earlier setting.
                let mut best: Option<(usize, f64)> = None;
                for si in 0..settings.len() {
                    let ok: Vec<f64> = per_setting(si).into_iter().flatten().collect();
                    let (mean, _) = mean_and_std(&ok);
                    if mean.is_finite() && best.is_none_or(|(_, b)| mean > b) {
                        best = Some((si, mean));
                    }
                }
                let si = best.map_or(0, |(i, _)| i);
                let results = per_setting(si);
                let per_run_auc: Vec<Option<f64>> = results.iter().map(|r| r.as_ref().ok().copied()).collect();
                let failures: Vec<String> = results.iter().filter_map(|r| r.as_ref().err().cloned()).collect();
                let ok: Vec<f64> = per_run_auc.iter().flatten().copied().collect();
                let (mean_auc, std_auc) = mean_and_std(&ok);
                if !failures.is_empty() {
                    log::warn!(
                        "{model} {method} {}={x}: {} of {} runs failed: {}",
                        experiment.x_name(),
                        failures.len(),
                        grid.n_runs,
                        failures[0]
                    );
                }
                cells.push(CellResult {
                    model,
                    method,
                    x_value: x,
                    mean_auc,
                    std_auc,
                    per_run_auc,
                    run_seeds: run_seeds.clone(),
                    chosen: settings[si],
                    n_failed: failures.len(),
                    failures,
                });
            }
        }
    }
    Ok(BenchmarkResult {
        experiment,
        grid: grid.clone(),
        cells,
    })
}

pub fn run_experiment1(grid: &ExperimentGrid) -> Result<BenchmarkResult> {
    run_experiment(grid, Experiment::HubStrength)
}

pub fn run_experiment2(grid: &ExperimentGrid) -> Result<BenchmarkResult> {
    run_experiment(grid, Experiment::HubFraction)
}

/// Writes one summary CSV per model plus a per-run CSV; returns the paths.
pub fn write_benchmark_csvs(result: &BenchmarkResult, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let exp = result.experiment.number();
    let csv_err = |path: &Path| {
        let path = path.to_path_buf();
        move |e: csv::Error| Error::Parse {
            path: path.clone(),
            message: e.to_string(),
        }
    };
    let mut written = Vec::new();
    for &model in &result.grid.models {
        let path = dir.join(format!("exp{exp}_{}.csv", model.name()));
        let mut w = csv::Writer::from_path(&path).map_err(csv_err(&path))?;
        w.write_record(["method", "x_value", "mean_auc", "std_auc", "alpha", "order", "n_failed"])
            .map_err(csv_err(&path))?;
        for c in result.cells.iter().filter(|c| c.model == model) {
            w.write_record([
                c.method.name().to_string(),
                fmt_f64(c.x_value),
                fmt_f64(c.mean_auc),
                fmt_f64(c.std_auc),
                c.chosen.alpha.map(fmt_f64).unwrap_or_default(),
                c.chosen.order.map(|t| t.to_string()).unwrap_or_default(),
                c.n_failed.to_string(),
            ])
            .map_err(csv_err(&path))?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }

    let path = dir.join(format!("exp{exp}_runs.csv"));
    let mut w = csv::Writer::from_path(&path).map_err(csv_err(&path))?;
    w.write_record(["model", "method", "x_value", "run", "seed", "auc"])
        .map_err(csv_err(&path))?;
    for c in &result.cells {
        for (run, (auc, seed)) in c.per_run_auc.iter().zip(&c.run_seeds).enumerate() {
            w.write_record([
                c.model.name().to_string(),
                c.method.name().to_string(),
                fmt_f64(c.x_value),
                run.to_string(),
                seed.to_string(),
                auc.map(fmt_f64).unwrap_or_else(|| "NA".into()),
            ])
            .map_err(csv_err(&path))?;
        }
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(written)
}

/// Shortest representation that round-trips exactly.
fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}
