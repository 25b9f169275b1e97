//! Command-line interface. Settings resolve as flags > config file >
//! defaults, and every successful run ends with a `manifest.json`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::baselines::{run_baseline, BaselineKind, BaselineParams, DirectConfig};
use crate::error::{Error, Result};
use crate::eval::bench::{run_experiment, write_benchmark_csvs, Experiment, ExperimentGrid};
use crate::eval::metrics::{knockout_delta_ge, normalized_entropy, sed_profile, SedProfile};
use crate::grafhub::{DualScaling, GrafhubConfig, GrafhubProblem, GrafhubResult};
use crate::graph::Graph;
use crate::io;
use crate::rng::{stream_rng, Stream};
use crate::scoring::{build_report, score_reconstruction, score_smoothness, Selection};
use crate::spectral::{filter_response, SignalMatrix, SpectralDecomposition};
use crate::synth::{generate, GraphModel, SigmaMode, SynthConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "grafhub", about = "Hub node detection with learned graph filters", disable_version_flag = true)]
pub struct Cli {
    /// Print the version and exit.
    #[arg(long)]
    pub version: bool,
    /// With --version, print machine-readable JSON.
    #[arg(long, requires = "version")]
    pub json: bool,
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Log level: error, warn, info, debug or trace.
    #[arg(long, global = true, default_value = "warn")]
    pub log_level: String,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic graph, signals with injected hubs, and labels.
    Synth(SynthArgs),
    /// Fit the learned filter and report hubs under both scorings.
    Detect(DetectArgs),
    /// Score nodes with a comparison method.
    Baseline(BaselineArgs),
    /// Run a benchmark experiment and write AUC tables.
    Bench(BenchArgs),
    /// Spectral energy distribution and knockout diagnostics.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// SynthConfig as JSON or TOML.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub model: Option<GraphModel>,
    #[arg(long)]
    pub n_nodes: Option<usize>,
    #[arg(long)]
    pub er_p: Option<f64>,
    #[arg(long)]
    pub ba_m: Option<usize>,
    #[arg(long)]
    pub n_signals: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub hub_fraction: Option<f64>,
    /// Hub strength u.
    #[arg(long)]
    pub hub_strength: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub sigma_mode: Option<SigmaModeArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SigmaModeArg {
    RowNorm,
    ColumnEntries,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Edge list CSV with header `src,dst[,weight]`.
    #[arg(long)]
    pub graph: PathBuf,
    /// Signal CSV, one row per node.
    #[arg(long)]
    pub signals: PathBuf,
    /// The signal CSV has a header and node ids in its first column.
    #[arg(long)]
    pub signals_have_ids: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectKind {
    Zthresh,
    Topk,
    Elbow,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long, value_enum)]
    pub select: Option<SelectKind>,
    /// Number of hubs for --select topk.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub z_cut: Option<f64>,
    /// Fraction of positions searched by --select elbow.
    #[arg(long)]
    pub elbow_window: Option<f64>,
    /// Louvain restarts for connector-hub flags.
    #[arg(long)]
    pub community_restarts: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectSettings {
    pub select: SelectKind,
    pub k: Option<usize>,
    pub z_cut: f64,
    pub elbow_window: f64,
    pub community_restarts: usize,
}

impl Default for SelectSettings {
    fn default() -> Self {
        Self {
            select: SelectKind::Zthresh,
            k: None,
            z_cut: crate::scoring::DEFAULT_Z_CUT,
            elbow_window: crate::scoring::DEFAULT_ELBOW_WINDOW,
            community_restarts: 1,
        }
    }
}

impl SelectSettings {
    fn apply(&mut self, a: &SelectArgs) {
        set(&mut self.select, a.select);
        if a.k.is_some() {
            self.k = a.k;
        }
        set(&mut self.z_cut, a.z_cut);
        set(&mut self.elbow_window, a.elbow_window);
        set(&mut self.community_restarts, a.community_restarts);
    }

    fn rule(&self) -> Result<Selection> {
        Ok(match self.select {
            SelectKind::Zthresh => Selection::ZThreshold { z_cut: self.z_cut },
            SelectKind::Topk => Selection::TopK {
                k: self.k.ok_or_else(|| Error::invalid("k", "--select topk needs --k"))?,
            },
            SelectKind::Elbow => Selection::Elbow {
                window: self.elbow_window,
                k: 0,
            },
        })
    }
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// DetectSettings as JSON or TOML.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    /// Filter order T (number of taps).
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Use `V ← V + ρ r` for the dual step.
    #[arg(long)]
    pub rho_dual: bool,
    #[command(flatten)]
    pub selection: SelectArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct DetectSettings {
    pub solver: GrafhubConfig,
    pub selection: SelectSettings,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// One of DegreeCentrality, EigenvectorCentrality, ClosenessCentrality,
    /// BetweennessCentrality, GHF_RE, GHF_Sm, DirectF_RE, DirectF_Sm, LOF,
    /// IsolationForest.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub lof_neighbors: Option<usize>,
    #[arg(long)]
    pub n_trees: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub selection: SelectArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineSettings {
    pub method: BaselineKind,
    pub alpha: f64,
    pub lof_neighbors: usize,
    pub n_trees: usize,
    pub seed: u64,
    pub direct_rho: f64,
    pub direct_tol: f64,
    pub direct_max_iter: usize,
    pub selection: SelectSettings,
}

impl Default for BaselineSettings {
    fn default() -> Self {
        let p = BaselineParams::default();
        Self {
            method: BaselineKind::DegreeCentrality,
            alpha: p.alpha,
            lof_neighbors: p.lof_neighbors,
            n_trees: p.n_trees,
            seed: p.seed,
            direct_rho: p.direct.rho,
            direct_tol: p.direct.tol,
            direct_max_iter: p.direct.max_iter,
            selection: SelectSettings::default(),
        }
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// 1: sweep hub strength; 2: sweep hub fraction.
    #[arg(long)]
    pub experiment: u8,
    /// ExperimentGrid as JSON or TOML; starts from --preset.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "desk")]
    pub preset: Preset,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Preset {
    Full,
    Desk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSettings {
    pub experiment: Experiment,
    pub grid: ExperimentGrid,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// HubReport JSON from `detect` or `baseline`; its hub_set is knocked out.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// CSV of nonnegative integer count vectors, one per line, for
    /// normalized entropy.
    #[arg(long)]
    pub counts: Option<PathBuf>,
    /// Non-hub nodes sampled for the knockout comparison (default: hub count).
    #[arg(long)]
    pub n_sampled: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeSettings {
    pub n_sampled: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub inputs: Vec<InputDigest>,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<PathBuf>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn load_or_default<T: serde::de::DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    path.map_or_else(|| Ok(T::default()), io::load_config)
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

struct Run {
    subcommand: &'static str,
    started_at: String,
    inputs: Vec<InputDigest>,
    outputs: Vec<PathBuf>,
}

impl Run {
    fn new(subcommand: &'static str) -> Self {
        Self {
            subcommand,
            started_at: now(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    fn input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(InputDigest {
            path: path.to_path_buf(),
            sha256: io::sha256_file(path)?,
        });
        Ok(())
    }

    fn json<T: Serialize + ?Sized>(&mut self, path: PathBuf, value: &T) -> Result<()> {
        io::write_json(&path, value)?;
        self.outputs.push(path);
        Ok(())
    }

    fn signals(&mut self, path: PathBuf, f: &SignalMatrix) -> Result<()> {
        io::write_signals(&path, f)?;
        self.outputs.push(path);
        Ok(())
    }

    fn finish<C: Serialize>(self, out: &Path, config: &C, seed: u64) -> Result<RunManifest> {
        let manifest = RunManifest {
            tool: "grafhub".into(),
            version: VERSION.into(),
            subcommand: self.subcommand.into(),
            config: serde_json::to_value(config)?,
            seed,
            inputs: self.inputs,
            started_at: self.started_at,
            finished_at: now(),
            outputs: self.outputs,
        };
        io::write_json(&out.join("manifest.json"), &manifest)?;
        Ok(manifest)
    }
}

fn load_inputs(run: &mut Run, input: &InputArgs) -> Result<(Graph, SignalMatrix)> {
    let signals = io::read_signals(&input.signals, input.signals_have_ids)?;
    let graph = io::read_edge_list(&input.graph, Some(signals.nrows()))?;
    run.input(&input.graph)?;
    run.input(&input.signals)?;
    Ok((graph, signals))
}

pub fn cmd_synth(args: &SynthArgs) -> Result<RunManifest> {
    let mut run = Run::new("synth");
    let mut cfg: SynthConfig = load_or_default(args.config.as_deref())?;
    if let Some(p) = &args.config {
        run.input(p)?;
    }
    set(&mut cfg.model, args.model);
    set(&mut cfg.n_nodes, args.n_nodes);
    set(&mut cfg.er_p, args.er_p);
    set(&mut cfg.ba_m, args.ba_m);
    set(&mut cfg.n_signals, args.n_signals);
    set(&mut cfg.gamma, args.gamma);
    set(&mut cfg.hub_fraction, args.hub_fraction);
    set(&mut cfg.hub_strength, args.hub_strength);
    set(&mut cfg.seed, args.seed);
    set(
        &mut cfg.sigma_mode,
        args.sigma_mode.map(|m| match m {
            SigmaModeArg::RowNorm => SigmaMode::RowNorm,
            SigmaModeArg::ColumnEntries => SigmaMode::ColumnEntries,
        }),
    );
    let instance = generate(&cfg)?;
    let out = &args.out;
    let graph_path = out.join("graph.csv");
    io::write_edge_list(&graph_path, &instance.graph)?;
    run.outputs.push(graph_path);
    run.signals(out.join("signals.csv"), &instance.signals)?;
    let labels_path = out.join("labels.csv");
    io::write_labels(&labels_path, &instance.hub_labels)?;
    run.outputs.push(labels_path);
    run.json(out.join("config.json"), &cfg)?;
    run.finish(out, &cfg, cfg.seed)
}

#[derive(Serialize)]
struct FilterDiagnostics<'a> {
    fit: &'a GrafhubResult,
    eigenvalues: Vec<f64>,
    response: Vec<f64>,
}

pub fn cmd_detect(args: &DetectArgs) -> Result<RunManifest> {
    let mut run = Run::new("detect");
    let mut settings: DetectSettings = load_or_default(args.config.as_deref())?;
    if let Some(p) = &args.config {
        run.input(p)?;
    }
    let s = &mut settings.solver;
    set(&mut s.alpha, args.alpha);
    set(&mut s.rho, args.rho);
    set(&mut s.filter_order, args.order);
    set(&mut s.tol, args.tol);
    set(&mut s.max_iter, args.max_iter);
    set(&mut s.seed, args.seed);
    if args.rho_dual {
        s.dual_scaling = DualScaling::Rho;
    }
    settings.selection.apply(&args.selection);
    settings.solver.validate()?;
    let rule = settings.selection.rule()?;

    let (graph, signals) = load_inputs(&mut run, &args.input)?;
    let decomp = SpectralDecomposition::of_graph(&graph)?;
    let fit = GrafhubProblem::new(&decomp, &signals, settings.solver.filter_order)?.fit(&settings.solver)?;
    let eigenvalues: Vec<f64> = decomp.eigenvalues().iter().copied().collect();
    let response = filter_response(&fit.h, &eigenvalues);

    let seed = settings.solver.seed;
    let restarts = settings.selection.community_restarts;
    let re = build_report(&graph, score_reconstruction(&signals, &fit.filtered)?, rule, seed, restarts)?;
    let sm = build_report(&graph, score_smoothness(&graph, &signals, &fit.filtered)?, rule, seed, restarts)?;

    let out = &args.out;
    run.json(
        out.join("fit.json"),
        &FilterDiagnostics {
            fit: &fit,
            eigenvalues,
            response,
        },
    )?;
    run.json(out.join("report_re.json"), &re)?;
    run.json(out.join("report_sm.json"), &sm)?;
    run.signals(out.join("filtered.csv"), &fit.filtered)?;
    run.signals(out.join("residual.csv"), &fit.residual)?;
    run.finish(out, &settings, seed)
}

pub fn cmd_baseline(args: &BaselineArgs) -> Result<RunManifest> {
    let mut run = Run::new("baseline");
    let mut settings: BaselineSettings = load_or_default(args.config.as_deref())?;
    if let Some(p) = &args.config {
        run.input(p)?;
    }
    if let Some(m) = &args.method {
        settings.method = m.parse()?;
    } else if args.config.is_none() {
        return Err(Error::invalid("method", "pass --method or a config file naming one"));
    }
    set(&mut settings.alpha, args.alpha);
    set(&mut settings.lof_neighbors, args.lof_neighbors);
    set(&mut settings.n_trees, args.n_trees);
    set(&mut settings.seed, args.seed);
    settings.selection.apply(&args.selection);
    let rule = settings.selection.rule()?;

    let (graph, signals) = load_inputs(&mut run, &args.input)?;
    let decomp = SpectralDecomposition::of_graph(&graph)?;
    let params = BaselineParams {
        alpha: settings.alpha,
        lof_neighbors: settings.lof_neighbors,
        n_trees: settings.n_trees,
        seed: settings.seed,
        direct: DirectConfig {
            rho: settings.direct_rho,
            tol: settings.direct_tol,
            max_iter: settings.direct_max_iter,
        },
    };
    let scores = run_baseline(settings.method, &graph, &decomp, &signals, &params)?;
    let report = build_report(&graph, scores, rule, settings.seed, settings.selection.community_restarts)?;
    run.json(args.out.join("report.json"), &report)?;
    run.finish(&args.out, &settings, settings.seed)
}

pub fn cmd_bench(args: &BenchArgs) -> Result<RunManifest> {
    let mut run = Run::new("bench");
    let experiment = Experiment::from_number(args.experiment)?;
    let mut grid = match &args.grid {
        Some(p) => {
            run.input(p)?;
            let preset = match args.preset {
                Preset::Full => ExperimentGrid::full(),
                Preset::Desk => ExperimentGrid::desk(),
            };
            // Fields absent from the file keep the preset's values.
            let mut base = serde_json::to_value(&preset)?;
            let overlay: serde_json::Value = io::load_config(p)?;
            merge(&mut base, overlay);
            serde_json::from_value(base).map_err(|e| Error::Parse {
                path: p.clone(),
                message: e.to_string(),
            })?
        }
        None => match args.preset {
            Preset::Full => ExperimentGrid::full(),
            Preset::Desk => ExperimentGrid::desk(),
        },
    };
    set(&mut grid.n_runs, args.runs);
    set(&mut grid.seed, args.seed);
    let result = run_experiment(&grid, experiment)?;
    for path in write_benchmark_csvs(&result, &args.out)? {
        run.outputs.push(path);
    }
    run.json(args.out.join(format!("exp{}_result.json", experiment.number())), &result)?;
    let seed = grid.seed;
    run.finish(&args.out, &BenchSettings { experiment, grid }, seed)
}

fn merge(base: &mut serde_json::Value, overlay: serde_json::Value) {
    match (base, overlay) {
        (serde_json::Value::Object(b), serde_json::Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

#[derive(Debug, Serialize)]
pub struct KnockoutEntry {
    pub node: usize,
    pub delta_ge: f64,
}

#[derive(Debug, Serialize)]
pub struct Analysis {
    pub sed: SedProfile,
    pub sed_sum: f64,
    pub knockout_hubs: Vec<KnockoutEntry>,
    pub knockout_sampled: Vec<KnockoutEntry>,
    pub mean_delta_ge_hubs: Option<f64>,
    pub mean_delta_ge_sampled: Option<f64>,
    pub entropy: Vec<f64>,
}

fn read_hub_set(path: &Path) -> Result<Vec<usize>> {
    let value: serde_json::Value = io::load_config(path)?;
    let ids = value
        .get("hub_set")
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            message: "expected a report with a `hub_set` array".into(),
        })?;
    ids.iter()
        .map(|v| {
            v.as_u64().map(|x| x as usize).ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                message: format!("hub id `{v}` is not a non-negative integer"),
            })
        })
        .collect()
}

fn read_counts(path: &Path) -> Result<Vec<Vec<u64>>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.split(',')
                .map(|f| {
                    f.trim().parse::<u64>().map_err(|_| Error::Parse {
                        path: path.to_path_buf(),
                        message: format!("line {}: `{f}` is not a nonnegative integer", i + 1),
                    })
                })
                .collect()
        })
        .collect()
}

fn mean(entries: &[KnockoutEntry]) -> Option<f64> {
    (!entries.is_empty()).then(|| entries.iter().map(|e| e.delta_ge).sum::<f64>() / entries.len() as f64)
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<RunManifest> {
    use rand::seq::SliceRandom;

    let mut run = Run::new("analyze");
    let settings = AnalyzeSettings {
        n_sampled: args.n_sampled,
        seed: args.seed.unwrap_or(0),
    };
    let (graph, signals) = load_inputs(&mut run, &args.input)?;
    let decomp = SpectralDecomposition::of_graph(&graph)?;
    let sed = sed_profile(&decomp, &signals)?;

    let hubs = match &args.report {
        Some(p) => {
            run.input(p)?;
            read_hub_set(p)?
        }
        None => Vec::new(),
    };
    if let Some(&bad) = hubs.iter().find(|&&h| h >= graph.n_nodes()) {
        return Err(Error::NodeOutOfRange {
            node: bad,
            n_nodes: graph.n_nodes(),
        });
    }
    let (knockout_hubs, knockout_sampled) = if hubs.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        let mut others: Vec<usize> = (0..graph.n_nodes()).filter(|i| !hubs.contains(i)).collect();
        others.shuffle(&mut stream_rng(settings.seed, Stream::Sampling));
        others.truncate(settings.n_sampled.unwrap_or(hubs.len()));
        others.sort_unstable();
        let entries = |nodes: &[usize]| -> Result<Vec<KnockoutEntry>> {
            Ok(nodes
                .iter()
                .zip(knockout_delta_ge(&graph, nodes)?)
                .map(|(&node, delta_ge)| KnockoutEntry { node, delta_ge })
                .collect())
        };
        (entries(&hubs)?, entries(&others)?)
    };

    let entropy = match &args.counts {
        Some(p) => {
            run.input(p)?;
            read_counts(p)?
                .iter()
                .map(|c| normalized_entropy(c))
                .collect::<Result<Vec<_>>>()?
        }
        None => Vec::new(),
    };

    let analysis = Analysis {
        sed_sum: sed.sed.iter().sum(),
        mean_delta_ge_hubs: mean(&knockout_hubs),
        mean_delta_ge_sampled: mean(&knockout_sampled),
        sed,
        knockout_hubs,
        knockout_sampled,
        entropy,
    };
    let out = &args.out;
    let mut csv = String::from("eigenvalue,sed\n");
    for (l, s) in analysis.sed.eigenvalues.iter().zip(&analysis.sed.sed) {
        csv.push_str(&format!("{},{}\n", io::format_f64(*l), io::format_f64(*s)));
    }
    let sed_path = out.join("sed.csv");
    io::write_atomic(&sed_path, csv.as_bytes())?;
    run.outputs.push(sed_path);
    run.json(out.join("analysis.json"), &analysis)?;
    let seed = settings.seed;
    run.finish(out, &settings, seed)
}

#[derive(Serialize)]
struct VersionInfo {
    name: &'static str,
    version: &'static str,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let _ = env_logger::Builder::new()
        .parse_filters(&cli.log_level)
        .format_timestamp(None)
        .try_init();
    if cli.version {
        if cli.json {
            let info = VersionInfo {
                name: "grafhub",
                version: VERSION,
            };
            println!("{}", serde_json::to_string(&info).expect("serializable"));
        } else {
            println!("grafhub {VERSION}");
        }
        return 0;
    }
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return 2;
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    let Some(command) = cli.command else {
        eprintln!("error: no subcommand given; see --help");
        return 2;
    };
    let result = match &command {
        Command::Synth(a) => cmd_synth(a),
        Command::Detect(a) => cmd_detect(a),
        Command::Baseline(a) => cmd_baseline(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Analyze(a) => cmd_analyze(a),
    };
    match result {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
