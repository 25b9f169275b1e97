//! Independent reference computations shared by the oracle and acceptance
//! targets. Each check returns a one-line summary or a failure message.
#![allow(dead_code)]

use grafhub::community::participation_coefficient;
use grafhub::eval::metrics::{auc_roc, global_efficiency};
use grafhub::grafhub::{assemble_b, assemble_y, soft_threshold, NormalEquations};
use grafhub::spectral::{
    apply_filter, compute_shifted_signals, total_variation, FilterCoefficients, SignalMatrix,
    SpectralDecomposition,
};
use grafhub::{normalized_laplacian, Graph};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<String, String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Weighted random graph on `n` nodes with a ring underneath so no node is
/// isolated.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let ring = j == i + 1 || (i == 0 && j == n - 1);
            if ring || rng.random::<f64>() < p {
                edges.push((i, j, rng.random_range(0.2..3.0)));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> SignalMatrix {
    SignalMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// Soft threshold against a brute-force minimization of
/// `½(z − x)² + κ|z|` over a fine grid.
pub fn prox_vs_grid() -> Check {
    let mut r = rng(11);
    let step = 1e-5;
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let x: f64 = r.random_range(-3.0..3.0);
        let kappa: f64 = r.random_range(0.0..2.0);
        let (lo, hi) = (x.min(0.0) - 0.5, x.max(0.0) + 0.5);
        let steps = ((hi - lo) / step) as usize;
        let mut best = (f64::INFINITY, 0.0);
        for s in 0..=steps {
            let z = lo + s as f64 * step;
            let val = 0.5 * (z - x) * (z - x) + kappa * z.abs();
            if val < best.0 {
                best = (val, z);
            }
        }
        // z = 0 is the minimizer whenever |x| ≤ κ; make sure the grid has it.
        let at_zero = 0.5 * x * x;
        if at_zero <= best.0 {
            best = (at_zero, 0.0);
        }
        worst = worst.max((soft_threshold(x, kappa) - best.1).abs());
    }
    if worst <= 1e-4 {
        Ok(format!("max |prox − grid| = {worst:.2e} over 200 cases"))
    } else {
        Err(format!("prox deviates from grid search by {worst:.3e}"))
    }
}

/// `U H(Λ) Uᵀ F` and the shifted-signal combination against Horner's rule
/// on the explicit Laplacian.
pub fn filter_paths_agree() -> Check {
    let mut r = rng(12);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = r.random_range(3..=50);
        let density = r.random_range(0.05..0.5);
        let g = random_graph(&mut r, n, density);
        let l = normalized_laplacian(&g);
        let decomp = SpectralDecomposition::of_graph(&g).map_err(|e| e.to_string())?;
        let order = r.random_range(2..=6);
        let taps: Vec<f64> = (0..order).map(|_| r.random_range(-1.0..1.0)).collect();
        let cols = r.random_range(1..=5);
        let f = random_matrix(&mut r, n, cols);
        let mut horner = f.clone() * taps[order - 1];
        for t in (0..order - 1).rev() {
            horner = &l * horner + &f * taps[t];
        }
        let h = FilterCoefficients::new(taps).map_err(|e| e.to_string())?;
        let spectral = apply_filter(&decomp, &h, &f).map_err(|e| e.to_string())?;
        let shifted = compute_shifted_signals(&decomp, &f, order)
            .and_then(|s| s.combine(&h))
            .map_err(|e| e.to_string())?;
        worst = worst.max(rel_err(&spectral, &horner)).max(rel_err(&shifted, &horner));
    }
    if worst <= 1e-8 {
        Ok(format!("max relative error {worst:.2e} over 100 graphs"))
    } else {
        Err(format!("filter paths differ by relative {worst:.3e}"))
    }
}

/// Gradient of the h-step objective
/// `φ(h) = tr(F̃ᵀ L F̃) + ρ/2 ‖Z − F + V + F̃‖²`, `F̃ = Σ_t h_t S^(t)`,
/// by central differences at the solved (unprojected) h.
pub fn h_step_stationary() -> Check {
    let mut r = rng(13);
    let mut worst = 0.0f64;
    for case in 0..10 {
        let n = 20 + 3 * case;
        let g = random_graph(&mut r, n, 0.2);
        let l = normalized_laplacian(&g);
        let decomp = SpectralDecomposition::of_graph(&g).map_err(|e| e.to_string())?;
        let p = 4;
        let order = 2 + case % 4;
        let rho = [0.5, 1.0, 2.0][case % 3];
        let f = random_matrix(&mut r, n, p);
        let z = random_matrix(&mut r, n, p);
        let v = random_matrix(&mut r, n, p);
        let shifted = compute_shifted_signals(&decomp, &f, order).map_err(|e| e.to_string())?;
        let y = assemble_y(&shifted, &l, rho).map_err(|e| e.to_string())?;
        let b = assemble_b(&f, &shifted, &z, &v, rho).map_err(|e| e.to_string())?;
        let h = NormalEquations::new(y).and_then(|s| s.solve(&b)).map_err(|e| e.to_string())?;

        let gap = &z - &f + &v;
        let phi = |h: &DVector<f64>| -> f64 {
            let mut ft = SignalMatrix::zeros(n, p);
            for t in 0..order {
                ft += shifted.get(t) * h[t];
            }
            let tv = ft.dot(&(&l * &ft));
            tv + 0.5 * rho * (&gap + &ft).norm_squared()
        };
        let mut grad = DVector::zeros(order);
        let mut scale = 0.0f64;
        for t in 0..order {
            let eps = 1e-4 * h[t].abs().max(1.0);
            let mut up = h.clone();
            up[t] += eps;
            let mut down = h.clone();
            down[t] -= eps;
            let (pu, pd) = (phi(&up), phi(&down));
            grad[t] = (pu - pd) / (2.0 * eps);
            // Size of a typical directional derivative, for the relative norm.
            scale = scale.max(((pu - phi(&h)) / eps).abs());
        }
        let rel = grad.norm() / b.norm().max(scale).max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
    }
    if worst < 1e-5 {
        Ok(format!("max relative gradient {worst:.2e} over 10 systems"))
    } else {
        Err(format!("h-step gradient not zero: relative norm {worst:.3e}"))
    }
}

/// AUC by counting positive/negative pairs, ties worth ½.
pub fn brute_force_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let mut halves = 0u64;
    let mut pairs = 0u64;
    for (i, &li) in labels.iter().enumerate() {
        if !li {
            continue;
        }
        for (j, &lj) in labels.iter().enumerate() {
            if lj {
                continue;
            }
            pairs += 1;
            if scores[i] > scores[j] {
                halves += 2;
            } else if scores[i] == scores[j] {
                halves += 1;
            }
        }
    }
    halves as f64 / 2.0 / pairs as f64
}

pub fn auc_matches_pair_count() -> Check {
    let mut r = rng(14);
    for case in 0..500 {
        let n = r.random_range(2..60);
        let levels = r.random_range(2..12);
        let scores: Vec<f64> = (0..n).map(|_| r.random_range(0..levels) as f64).collect();
        let mut labels: Vec<bool> = (0..n).map(|_| r.random::<f64>() < 0.3).collect();
        labels[0] = true;
        labels[1] = false;
        let got = auc_roc(&scores, &labels).map_err(|e| e.to_string())?;
        let want = brute_force_auc(&scores, &labels);
        if got != want {
            return Err(format!("case {case}: rank AUC {got} vs pair count {want}"));
        }
    }
    Ok("500 tied-score cases equal bit for bit".into())
}

/// `tr(Fᵀ L F)` against `Σ_{i<j} w_ij ‖f_i/√d_i − f_j/√d_j‖²`.
pub fn tv_trace_vs_edgewise() -> Check {
    let mut r = rng(15);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = r.random_range(3..=40);
        let g = random_graph(&mut r, n, 0.3);
        let cols = r.random_range(1..=4);
        let f = random_matrix(&mut r, n, cols);
        let trace = total_variation(&normalized_laplacian(&g), &f).map_err(|e| e.to_string())?;
        let d = g.degrees();
        let edgewise: f64 = g
            .edges()
            .iter()
            .map(|&(i, j, w)| {
                let diff = f.row(i) / d[i].sqrt() - f.row(j) / d[j].sqrt();
                w * diff.norm_squared()
            })
            .sum();
        worst = worst.max((trace - edgewise).abs() / edgewise.abs().max(1e-300));
    }
    if worst <= 1e-8 {
        Ok(format!("max relative gap {worst:.2e} over 50 graphs"))
    } else {
        Err(format!("trace and edgewise total variation differ by {worst:.3e}"))
    }
}

pub fn complete_graph(n: usize) -> Graph {
    let edges: Vec<_> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j, 1.0)))
        .collect();
    Graph::from_edges(n, &edges).unwrap()
}

pub fn complete_graph_efficiency() -> Check {
    for n in 2..=15 {
        let ge = global_efficiency(&complete_graph(n)).map_err(|e| e.to_string())?;
        if ge != 1.0 {
            return Err(format!("GE(K_{n}) = {ge:?}"));
        }
    }
    Ok("GE(K_n) = 1 for n = 2..15".into())
}

/// Star centre 0 with leaves 1..=4 under three community assignments.
pub fn participation_hand_cases() -> Check {
    let edges: Vec<_> = (1..5).map(|l| (0, l, 1.0)).collect();
    let star = Graph::from_edges(5, &edges).unwrap();
    let cases: [(&[usize], f64); 3] = [
        (&[0, 0, 0, 0, 0], 0.0),
        (&[0, 0, 0, 1, 1], 0.5),
        (&[0, 0, 1, 2, 3], 0.75),
    ];
    for (labels, want) in cases {
        let pc = participation_coefficient(&star, labels).map_err(|e| e.to_string())?;
        if pc[0] != want {
            return Err(format!("labels {labels:?}: centre participation {} != {want}", pc[0]));
        }
    }
    Ok("centre participation 0, 0.5, 0.75".into())
}

/// Every criterion-1 check in order.
pub fn oracle_suite() -> Vec<(&'static str, Check)> {
    vec![
        ("soft-threshold prox vs grid search", prox_vs_grid()),
        ("spectral vs polynomial filter", filter_paths_agree()),
        ("h-step stationarity", h_step_stationary()),
        ("AUC vs pair counting", auc_matches_pair_count()),
        ("total variation trace vs edgewise", tv_trace_vs_edgewise()),
        ("GE of complete graphs", complete_graph_efficiency()),
        ("participation hand cases", participation_hand_cases()),
    ]
}
