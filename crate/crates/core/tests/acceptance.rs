//! End-to-end acceptance checks at desk scale, one test per criterion. Each
//! test prints a PASS/FAIL line with its evidence.

mod common;

use std::io::Write;
use std::sync::OnceLock;

use grafhub::baselines::BaselineKind;
use grafhub::eval::bench::{pooled_std_error, run_experiment, BenchmarkResult, CellResult, Experiment, ExperimentGrid, Method};
use grafhub::eval::metrics::{knockout_delta_ge, sed_profile, spearman};
use grafhub::rng::{derive_seed, stream_rng, Stream};
use grafhub::scoring::{rank_descending, score_reconstruction};
use grafhub::spectral::filter_response;
use grafhub::synth::generate_with_spectrum;
use grafhub::{GrafhubConfig, GrafhubProblem, GraphModel, SynthConfig};
use rand::seq::SliceRandom;

const RUNS: usize = 50;
const CENTRALITIES: [Method; 4] = [
    Method::Baseline(BaselineKind::DegreeCentrality),
    Method::Baseline(BaselineKind::EigenvectorCentrality),
    Method::Baseline(BaselineKind::ClosenessCentrality),
    Method::Baseline(BaselineKind::BetweennessCentrality),
];
const DIRECT: [Method; 2] = [
    Method::Baseline(BaselineKind::DirectRe),
    Method::Baseline(BaselineKind::DirectSm),
];

struct Outcome {
    pass: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { pass: true, lines: Vec::new() }
    }

    fn check(&mut self, ok: bool, msg: String) {
        self.pass &= ok;
        self.lines.push(format!("    [{}] {msg}", if ok { "ok" } else { "FAIL" }));
    }

    fn note(&mut self, msg: String) {
        self.lines.push(format!("    {msg}"));
    }
}

/// Bypasses libtest output capture so the summary is always visible.
fn say(line: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

fn report(number: usize, title: &str, outcome: &Outcome) {
    let tag = if outcome.pass { "PASS" } else { "FAIL" };
    let mut block = format!("criterion {number} {tag}: {title}");
    for l in &outcome.lines {
        block.push('\n');
        block.push_str(l);
    }
    say(&block);
    assert!(outcome.pass, "criterion {number} failed: {title}");
}

fn desk_grid(methods: Vec<Method>) -> ExperimentGrid {
    let mut grid = ExperimentGrid::desk();
    grid.n_runs = RUNS;
    grid.methods = methods;
    grid
}

fn cell<'a>(r: &'a BenchmarkResult, model: GraphModel, method: Method, x: f64) -> &'a CellResult {
    r.cell(model, method, x).unwrap_or_else(|| panic!("missing cell {model} {} {x}", method.name()))
}

/// The better of two variants of one method in a cell.
fn better<'a>(r: &'a BenchmarkResult, model: GraphModel, pair: [Method; 2], x: f64) -> &'a CellResult {
    let (a, b) = (cell(r, model, pair[0], x), cell(r, model, pair[1], x));
    if b.mean_auc > a.mean_auc {
        b
    } else {
        a
    }
}

const GRAFHUB: [Method; 2] = [Method::GrafhubRe, Method::GrafhubSm];

fn criterion_oracles() -> Outcome {
    let mut o = Outcome::new();
    let start = std::time::Instant::now();
    for (name, check) in common::oracle_suite() {
        match check {
            Ok(msg) => o.check(true, format!("{name}: {msg}")),
            Err(msg) => o.check(false, format!("{name}: {msg}")),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    o.check(secs < 60.0, format!("suite took {secs:.1} s"));
    o
}

fn criterion_experiment1(exp1: &BenchmarkResult, direct: &BenchmarkResult) -> Outcome {
    let mut o = Outcome::new();
    let us = exp1.grid.u_values.clone();

    let degree = Method::Baseline(BaselineKind::DegreeCentrality);
    for &u in &us {
        let c = cell(exp1, GraphModel::BaDegree, degree, u);
        o.check((c.mean_auc - 1.0).abs() <= 0.01, format!("BAdegree degree centrality u={u}: AUC {:.4}", c.mean_auc));
    }

    for method in GRAFHUB {
        let series = exp1.series(GraphModel::Er, method);
        let means: Vec<String> = series.iter().map(|c| format!("{:.4}", c.mean_auc)).collect();
        let mut ok = true;
        for w in series.windows(2) {
            ok &= w[1].mean_auc >= w[0].mean_auc - pooled_std_error(w[0], w[1]);
        }
        o.check(ok, format!("{} on ER nondecreasing in u: {}", method.name(), means.join(", ")));
    }

    let sm = cell(exp1, GraphModel::Er, Method::GrafhubSm, 2.0);
    for c in CENTRALITIES {
        let base = cell(exp1, GraphModel::Er, c, 2.0);
        let se = pooled_std_error(sm, base);
        o.check(
            sm.mean_auc - base.mean_auc > se,
            format!(
                "ER u=2 GraFHub_Sm {:.4} vs {} {:.4}: margin {:.4}, pooled SE {:.4}",
                sm.mean_auc,
                c.name(),
                base.mean_auc,
                sm.mean_auc - base.mean_auc,
                se
            ),
        );
    }
    let g = better(direct, GraphModel::Er, GRAFHUB, 2.0);
    let d = better(direct, GraphModel::Er, DIRECT, 2.0);
    let se = pooled_std_error(g, d);
    o.check(
        g.mean_auc - d.mean_auc > se,
        format!(
            "ER u=2 {} {:.6} vs {} {:.6}: margin {:.2e}, pooled SE {:.2e}",
            g.method.name(),
            g.mean_auc,
            d.method.name(),
            d.mean_auc,
            g.mean_auc - d.mean_auc,
            se
        ),
    );

    let avg = |m: Method| us.iter().map(|&u| cell(exp1, GraphModel::Er, m, u).mean_auc).sum::<f64>() / us.len() as f64;
    let (sm_avg, re_avg) = (avg(Method::GrafhubSm), avg(Method::GrafhubRe));
    let tag = if sm_avg >= re_avg { "holds" } else { "WARNING: violated" };
    o.note(format!("GraFHub_Sm {sm_avg:.4} >= GraFHub_RE {re_avg:.4} averaged over ER cells: {tag}"));
    o
}

fn criterion_experiment2(exp2: &BenchmarkResult) -> Outcome {
    let mut o = Outcome::new();
    let fractions = exp2.grid.hub_fractions.clone();
    let (lo, hi) = (fractions[0], *fractions.last().unwrap());
    for model in GraphModel::ALL {
        let a = better(exp2, model, GRAFHUB, lo);
        let b = better(exp2, model, GRAFHUB, hi);
        o.check(
            b.mean_auc < a.mean_auc,
            format!(
                "{model}: GraFHub at {hi} ({}) {:.4} < at {lo} ({}) {:.4}",
                b.method.name(),
                b.mean_auc,
                a.method.name(),
                a.mean_auc
            ),
        );
    }
    for model in GraphModel::ALL {
        for c in CENTRALITIES {
            let means: Vec<f64> = exp2.series(model, c).iter().map(|c| c.mean_auc).collect();
            let rho = spearman(&fractions, &means).unwrap();
            let shown: Vec<String> = means.iter().map(|m| format!("{m:.3}")).collect();
            o.check(
                rho.abs() < 0.5,
                format!("{model} {}: |Spearman| {:.2} over [{}]", c.name(), rho.abs(), shown.join(", ")),
            );
        }
    }
    o
}

fn er_instance(seed: u64, u: f64) -> SynthConfig {
    SynthConfig {
        model: GraphModel::Er,
        n_nodes: 200,
        n_signals: 50,
        gamma: 30.0,
        hub_strength: u,
        seed,
        ..SynthConfig::default()
    }
}

fn criterion_low_pass() -> Outcome {
    let mut o = Outcome::new();
    let mut low_pass = 0;
    let cfg = GrafhubConfig::default();
    for i in 0..20u64 {
        let (inst, decomp) = generate_with_spectrum(&er_instance(derive_seed(4, &[i]), 2.0)).unwrap();
        let fit = GrafhubProblem::new(&decomp, &inst.signals, cfg.filter_order)
            .and_then(|p| p.fit(&GrafhubConfig { seed: i, ..cfg.clone() }))
            .unwrap();
        let lams = decomp.eigenvalues().as_slice();
        let resp = filter_response(&fit.h, lams);
        let mean_abs = |keep: &dyn Fn(f64) -> bool| {
            let v: Vec<f64> = lams.iter().zip(&resp).filter(|(&l, _)| keep(l)).map(|(_, r)| r.abs()).collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        if mean_abs(&|l| l < 1.0) > mean_abs(&|l| l >= 1.0) {
            low_pass += 1;
        }
    }
    o.check(low_pass >= 18, format!("{low_pass}/20 learned filters are low-pass (α=1, T=3)"));
    o
}

/// Spearman correlation between the SED ratio of the input signals and the
/// mean top-K reconstruction score, K the true hub count.
fn sed_coupling(cfg: &GrafhubConfig) -> f64 {
    let (mut ratios, mut scores) = (Vec::new(), Vec::new());
    for i in 0..20u64 {
        let u = (1 + i % 6) as f64;
        let (inst, decomp) = generate_with_spectrum(&er_instance(derive_seed(5, &[i]), u)).unwrap();
        ratios.push(sed_profile(&decomp, &inst.signals).unwrap().sed_ratio);
        let fit = GrafhubProblem::new(&decomp, &inst.signals, cfg.filter_order)
            .and_then(|p| p.fit(&GrafhubConfig { seed: i, ..cfg.clone() }))
            .unwrap();
        let s = score_reconstruction(&inst.signals, &fit.filtered).unwrap().scores;
        let k = inst.hub_nodes().len();
        scores.push(rank_descending(&s)[..k].iter().map(|&j| s[j]).sum::<f64>() / k as f64);
    }
    spearman(&ratios, &scores).unwrap()
}

fn criterion_sed_coupling(exp1: &BenchmarkResult) -> Outcome {
    let mut o = Outcome::new();
    let cfg = GrafhubConfig::default();
    let rho = sed_coupling(&cfg);
    o.check(
        rho > 0.5,
        format!("Spearman(sed_ratio, mean top-K RE score) = {rho:.3} over 20 instances (α=1, T=3)"),
    );
    // Diagnostic only: the setting the benchmark picked for RE on ER, u = 2.
    let chosen = cell(exp1, GraphModel::Er, Method::GrafhubRe, 2.0).chosen;
    let (alpha, order) = (chosen.alpha.unwrap(), chosen.order.unwrap());
    let tuned = sed_coupling(&GrafhubConfig {
        alpha,
        filter_order: order,
        ..cfg
    });
    o.note(format!("diagnostic at benchmark-selected α={alpha}, T={order}: Spearman {tuned:.3}"));
    o
}

fn criterion_knockout() -> Outcome {
    let mut o = Outcome::new();
    let mut wins = 0;
    let (mut hub_means, mut other_means) = (Vec::new(), Vec::new());
    for i in 0..20u64 {
        let cfg = SynthConfig {
            model: GraphModel::BaDegree,
            n_nodes: 200,
            ba_m: 3,
            n_signals: 10,
            seed: derive_seed(6, &[i]),
            ..SynthConfig::default()
        };
        let (inst, _) = generate_with_spectrum(&cfg).unwrap();
        let hubs = inst.hub_nodes();
        let mut others: Vec<usize> = (0..200).filter(|j| !inst.hub_labels[*j]).collect();
        others.shuffle(&mut stream_rng(cfg.seed, Stream::Sampling));
        others.truncate(hubs.len());
        let mean = |v: Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
        let h = mean(knockout_delta_ge(&inst.graph, &hubs).unwrap());
        let n = mean(knockout_delta_ge(&inst.graph, &others).unwrap());
        if h > n {
            wins += 1;
        }
        hub_means.push(h);
        other_means.push(n);
    }
    o.check(wins == 20, format!("hub knockout costs more in {wins}/20 BA graphs"));
    let avg = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    o.note(format!(
        "mean ΔGE over seeds: hubs {:.3e}, sampled non-hubs {:.3e}",
        avg(&hub_means),
        avg(&other_means)
    ));
    o
}

fn criterion_determinism(exp1: &BenchmarkResult, direct: &BenchmarkResult) -> Outcome {
    let mut o = Outcome::new();
    // Same cell computed inside two different grids.
    for method in GRAFHUB {
        let a = cell(exp1, GraphModel::Er, method, 2.0);
        let b = cell(direct, GraphModel::Er, method, 2.0);
        let same = a.per_run_auc.iter().zip(&b.per_run_auc).all(|(x, y)| x.map(f64::to_bits) == y.map(f64::to_bits));
        o.check(same && a.run_seeds == b.run_seeds, format!("{} ER u=2 per-run AUC identical across grids", method.name()));
    }
    // Full rerun of a small grid with every method.
    let mut grid = ExperimentGrid::desk();
    grid.models = vec![GraphModel::BaMixed];
    grid.u_values = vec![2.0];
    grid.n_runs = 3;
    grid.seed = 17;
    let a = run_experiment(&grid, Experiment::HubStrength).unwrap();
    let b = run_experiment(&grid, Experiment::HubStrength).unwrap();
    let same = a.cells.len() == b.cells.len()
        && a.cells.iter().zip(&b.cells).all(|(x, y)| {
            x.per_run_auc.iter().zip(&y.per_run_auc).all(|(p, q)| p.map(f64::to_bits) == q.map(f64::to_bits))
        });
    o.check(same, format!("rerun of {} cells with every method is bitwise identical", a.cells.len()));

    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let dir = tmp.path().join(name);
        let code = grafhub::cli::run_cli(["grafhub", "synth", "--n-nodes", "120", "--seed", "8", "--out", dir.to_str().unwrap()]);
        assert_eq!(code, 0);
        dir
    };
    let (x, y) = (run("x"), run("y"));
    let files = ["graph.csv", "signals.csv", "labels.csv", "config.json"];
    let identical = files.iter().all(|f| std::fs::read(x.join(f)).unwrap() == std::fs::read(y.join(f)).unwrap());
    o.check(identical, "synth outputs byte-identical across reruns".into());
    o
}

fn experiment1() -> &'static (BenchmarkResult, BenchmarkResult) {
    static CELL: OnceLock<(BenchmarkResult, BenchmarkResult)> = OnceLock::new();
    CELL.get_or_init(|| {
        let exp1 = run_experiment(&desk_grid([GRAFHUB.to_vec(), CENTRALITIES.to_vec()].concat()), Experiment::HubStrength)
            .unwrap();
        // Direct recovery is the slow baseline; it only enters the u = 2 ER
        // comparison. Run seeds depend on model and run only, so this cell
        // sees the same instances as the main grid.
        let mut grid = desk_grid([GRAFHUB.to_vec(), DIRECT.to_vec()].concat());
        grid.models = vec![GraphModel::Er];
        grid.u_values = vec![2.0];
        let direct = run_experiment(&grid, Experiment::HubStrength).unwrap();
        (exp1, direct)
    })
}

#[test]
fn criterion_1_oracle_suite() {
    report(1, "oracle suite", &criterion_oracles());
}

#[test]
fn criterion_2_experiment1() {
    let start = std::time::Instant::now();
    let (exp1, direct) = experiment1();
    let secs = start.elapsed().as_secs_f64();
    report(2, &format!("experiment 1 at desk scale ({secs:.0} s)"), &criterion_experiment1(exp1, direct));
}

#[test]
fn criterion_3_experiment2() {
    let start = std::time::Instant::now();
    let mut grid = desk_grid([GRAFHUB.to_vec(), CENTRALITIES.to_vec()].concat());
    grid.base.hub_strength = 2.0;
    let exp2 = run_experiment(&grid, Experiment::HubFraction).unwrap();
    let secs = start.elapsed().as_secs_f64();
    report(3, &format!("experiment 2 at desk scale ({secs:.0} s)"), &criterion_experiment2(&exp2));
}

#[test]
fn criterion_4_low_pass() {
    report(4, "learned filters are low-pass", &criterion_low_pass());
}

#[test]
fn criterion_5_sed_coupling() {
    report(5, "SED ratio tracks hub score", &criterion_sed_coupling(&experiment1().0));
}

#[test]
fn criterion_6_knockout() {
    report(6, "hub knockout direction", &criterion_knockout());
}

#[test]
fn criterion_7_determinism() {
    let (exp1, direct) = experiment1();
    report(7, "determinism", &criterion_determinism(exp1, direct));
}
