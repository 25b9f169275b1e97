//! Learning polynomial graph-filter taps by ADMM.
//!
//! The signal is split as `F = F̃ + F_h` with `F̃ = H(L_n) F` and
//! `H(L_n) = Σ_t h_t L_nᵗ`. The taps minimize
//!
//! ```text
//! α ‖F − H(L_n) F‖₁ + tr(F̃ᵀ L_n F̃)    subject to  ‖h‖₂ = 1
//! ```
//!
//! using the splitting `Z = F − H(L_n) F` and a scaled dual `V`:
//!
//! ```text
//! Z ← S_{α/ρ}(F − Σ_t h_t S^(t) − V)
//! h ← argmin ρ/2 ‖Z − F + Σ_t h_t S^(t) + V‖² + tr(F̃ᵀ L_n F̃), then h ← h/‖h‖
//! V ← V + (Z − F + Σ_t h_t S^(t))
//! ```
//!
//! The h-step solves the `T × T` system `Y h = −b`. `Y` does not depend on
//! `Z` or `V`, so it is assembled and factored once per fit.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{stream_rng, Stream};
use crate::spectral::{
    compute_shifted_signals, gft, FilterCoefficients, ShiftedSignals, SignalMatrix,
    SpectralDecomposition,
};

/// Condition number above which the h-step system is treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// How the dual variable absorbs the primal residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DualScaling {
    /// `V ← V + r`, consistent with the scaled augmented Lagrangian.
    #[default]
    Scaled,
    /// `V ← V + ρ r`.
    Rho,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrafhubConfig {
    pub alpha: f64,
    pub rho: f64,
    pub filter_order: usize,
    pub max_iter: usize,
    /// Stop once `‖h_{k+1} − h_k‖² ≤ tol`.
    pub tol: f64,
    pub seed: u64,
    pub dual_scaling: DualScaling,
}

impl Default for GrafhubConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            rho: 1.0,
            filter_order: 3,
            max_iter: 500,
            tol: 1e-3,
            seed: 0,
            dual_scaling: DualScaling::Scaled,
        }
    }
}

impl GrafhubConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::invalid("alpha", format!("must be positive and finite, got {}", self.alpha)));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::invalid("rho", format!("must be positive and finite, got {}", self.rho)));
        }
        if self.filter_order < 2 {
            return Err(Error::invalid("filter_order", format!("must be at least 2, got {}", self.filter_order)));
        }
        if self.max_iter < 1 {
            return Err(Error::invalid("max_iter", "must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol", format!("must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Iterate of the ADMM loop.
#[derive(Debug, Clone)]
pub struct AdmmState {
    pub z: SignalMatrix,
    pub v: SignalMatrix,
    pub h: FilterCoefficients,
    /// `Σ_t h_t S^(t)` for the current `h`.
    pub filtered: SignalMatrix,
    pub iteration: usize,
    pub last_h_delta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrafhubResult {
    pub h: FilterCoefficients,
    #[serde(skip)]
    pub filtered: SignalMatrix,
    /// `F − F̃`, the hub component.
    #[serde(skip)]
    pub residual: SignalMatrix,
    pub iterations: usize,
    pub converged: bool,
    pub objective_trace: Vec<f64>,
    pub primal_residual_trace: Vec<f64>,
}

/// Elementwise soft threshold `sign(x) · max(|x| − κ, 0)`.
pub fn soft_threshold(x: f64, kappa: f64) -> f64 {
    if x > kappa {
        x - kappa
    } else if x < -kappa {
        x + kappa
    } else {
        0.0
    }
}

fn check_shape(context: &'static str, expected: &SignalMatrix, found: &SignalMatrix) -> Result<()> {
    if expected.shape() != found.shape() {
        let (er, ec) = expected.shape();
        let (fr, fc) = found.shape();
        return Err(Error::DimensionMismatch {
            context,
            expected: er * ec,
            found: fr * fc,
        });
    }
    Ok(())
}

/// Z-step: `S_{α/ρ}(F − Σ_t h_t S^(t) − V)`.
pub fn z_update(
    f: &SignalMatrix,
    shifted: &ShiftedSignals,
    h: &FilterCoefficients,
    v: &SignalMatrix,
    alpha: f64,
    rho: f64,
) -> Result<SignalMatrix> {
    if !(rho > 0.0) {
        return Err(Error::invalid("rho", format!("must be positive, got {rho}")));
    }
    check_shape("z-update V", f, v)?;
    let filtered = shifted.combine(h)?;
    check_shape("z-update shifted signals", f, &filtered)?;
    Ok(prox_l1(f, &filtered, v, alpha / rho))
}

fn prox_l1(f: &SignalMatrix, filtered: &SignalMatrix, v: &SignalMatrix, kappa: f64) -> SignalMatrix {
    SignalMatrix::from_iterator(
        f.nrows(),
        f.ncols(),
        f.iter()
            .zip(filtered.iter())
            .zip(v.iter())
            .map(|((&fi, &fti), &vi)| soft_threshold(fi - fti - vi, kappa)),
    )
}

/// `Y = Σ_p (2 G_pᵀ L G_p + ρ G_pᵀ G_p)` where `G_p` stacks the shifted
/// signals of observation `p` as columns. Summed over `p` this is
/// `Y_st = 2⟨S^(s), L S^(t)⟩ + ρ⟨S^(s), S^(t)⟩`.
pub fn assemble_y(shifted: &ShiftedSignals, l: &DMatrix<f64>, rho: f64) -> Result<DMatrix<f64>> {
    let t = shifted.order();
    if l.nrows() != shifted.get(0).nrows() {
        return Err(Error::DimensionMismatch {
            context: "laplacian vs shifted signals",
            expected: shifted.get(0).nrows(),
            found: l.nrows(),
        });
    }
    let lap_shifted: Vec<SignalMatrix> = shifted.iter().map(|s| l * s).collect();
    let mut y = DMatrix::zeros(t, t);
    for a in 0..t {
        for b in a..t {
            let val = 2.0 * shifted.get(a).dot(&lap_shifted[b]) + rho * shifted.get(a).dot(shifted.get(b));
            y[(a, b)] = val;
            y[(b, a)] = val;
        }
    }
    Ok(y)
}

/// `b_t = ρ ⟨S^(t), Z − F + V⟩`.
pub fn assemble_b(
    f: &SignalMatrix,
    shifted: &ShiftedSignals,
    z: &SignalMatrix,
    v: &SignalMatrix,
    rho: f64,
) -> Result<DVector<f64>> {
    check_shape("h-update Z", f, z)?;
    check_shape("h-update V", f, v)?;
    let w = z - f + v;
    assemble_b_from_gap(shifted, &w, rho)
}

fn assemble_b_from_gap(shifted: &ShiftedSignals, gap: &SignalMatrix, rho: f64) -> Result<DVector<f64>> {
    let mut b = DVector::zeros(shifted.order());
    for (t, s) in shifted.iter().enumerate() {
        check_shape("h-update shifted signals", gap, s)?;
        b[t] = rho * s.dot(gap);
    }
    Ok(b)
}

/// Factored h-step system.
#[derive(Debug, Clone)]
pub struct NormalEquations {
    y: DMatrix<f64>,
    condition: f64,
    cholesky: Option<Cholesky<f64, nalgebra::Dyn>>,
}

impl NormalEquations {
    pub fn new(y: DMatrix<f64>) -> Result<Self> {
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("filter normal equations"));
        }
        let eig = SymmetricEigen::new(y.clone());
        let max = eig.eigenvalues.iter().fold(0.0f64, |m, &e| m.max(e.abs()));
        let min = eig.eigenvalues.iter().fold(f64::INFINITY, |m, &e| m.min(e.abs()));
        let condition = if min > 0.0 { max / min } else { f64::INFINITY };
        log::debug!("h-step system condition estimate {condition:.3e}");
        if !(condition <= MAX_CONDITION) {
            return Err(Error::SingularSystem { condition });
        }
        let cholesky = Cholesky::new(y.clone());
        if cholesky.is_none() {
            log::debug!("Cholesky failed on h-step system; using pivoted LU");
        }
        Ok(Self { y, condition, cholesky })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Solves `Y h = −b` without projecting.
    pub fn solve(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        let rhs = -b;
        let sol = match &self.cholesky {
            Some(c) => c.solve(&rhs),
            None => self
                .y
                .clone()
                .full_piv_lu()
                .solve(&rhs)
                .ok_or(Error::SingularSystem { condition: self.condition })?,
        };
        Ok(sol)
    }
}

/// Unit-norm projection. A zero solution keeps the sign convention `+1` on
/// the first tap.
fn project_unit(sol: DVector<f64>) -> Result<FilterCoefficients> {
    let norm = sol.norm();
    if !norm.is_finite() {
        return Err(Error::NonFinite("filter coefficients"));
    }
    if norm == 0.0 {
        let mut taps = vec![0.0; sol.len()];
        taps[0] = 1.0;
        return FilterCoefficients::new(taps);
    }
    FilterCoefficients::new(sol.iter().map(|x| x / norm).collect())
}

/// h-step: solves `Y h = −b` and projects onto the unit sphere.
pub fn h_update(
    f: &SignalMatrix,
    shifted: &ShiftedSignals,
    z: &SignalMatrix,
    v: &SignalMatrix,
    l: &DMatrix<f64>,
    rho: f64,
) -> Result<FilterCoefficients> {
    if !(rho > 0.0) {
        return Err(Error::invalid("rho", format!("must be positive, got {rho}")));
    }
    let system = NormalEquations::new(assemble_y(shifted, l, rho)?)?;
    let b = assemble_b(f, shifted, z, v, rho)?;
    project_unit(system.solve(&b)?)
}

/// Dual step: `V + c (Z − F + Σ_t h_t S^(t))` with `c = 1` (scaled) or `ρ`.
pub fn v_update(
    v: &SignalMatrix,
    z: &SignalMatrix,
    f: &SignalMatrix,
    shifted: &ShiftedSignals,
    h: &FilterCoefficients,
    rho: f64,
    scaling: DualScaling,
) -> Result<SignalMatrix> {
    check_shape("v-update V", f, v)?;
    check_shape("v-update Z", f, z)?;
    let filtered = shifted.combine(h)?;
    check_shape("v-update shifted signals", f, &filtered)?;
    let step = match scaling {
        DualScaling::Scaled => 1.0,
        DualScaling::Rho => rho,
    };
    Ok(v + (z - f + filtered) * step)
}

/// `α ‖F − F̃‖₁ + tr(F̃ᵀ L F̃)`.
pub fn objective(f: &SignalMatrix, filtered: &SignalMatrix, l: &DMatrix<f64>, alpha: f64) -> Result<f64> {
    check_shape("objective", f, filtered)?;
    if l.nrows() != f.nrows() || l.ncols() != f.nrows() {
        return Err(Error::DimensionMismatch {
            context: "objective laplacian",
            expected: f.nrows(),
            found: l.nrows(),
        });
    }
    let l1: f64 = f.iter().zip(filtered.iter()).map(|(a, b)| (a - b).abs()).sum();
    Ok(alpha * l1 + filtered.dot(&(l * filtered)))
}

/// Precomputed data for fitting one signal matrix on one graph, reusable
/// across `α`, `ρ` and filter orders up to `max_order`.
#[derive(Debug, Clone)]
pub struct GrafhubProblem<'a> {
    decomp: &'a SpectralDecomposition,
    signals: &'a SignalMatrix,
    shifted: ShiftedSignals,
    /// `‖F̂_i‖²`, the energy of the signals along eigenvector `i`.
    energies: Vec<f64>,
}

impl<'a> GrafhubProblem<'a> {
    pub fn new(decomp: &'a SpectralDecomposition, signals: &'a SignalMatrix, max_order: usize) -> Result<Self> {
        if signals.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("signals"));
        }
        let shifted = compute_shifted_signals(decomp, signals, max_order)?;
        let coeffs = gft(decomp, signals)?;
        let energies = coeffs.row_iter().map(|r| r.norm_squared()).collect();
        Ok(Self {
            decomp,
            signals,
            shifted,
            energies,
        })
    }

    pub fn max_order(&self) -> usize {
        self.shifted.order()
    }

    fn prefix(&self, order: usize) -> ShiftedSignals {
        self.shifted.prefix(order)
    }

    /// `Σ_i λ_iᵏ ‖F̂_i‖²` for `k < count`.
    fn spectral_moments(&self, count: usize) -> Vec<f64> {
        let mut moments = vec![0.0; count];
        for (&lam, &e) in self.decomp.eigenvalues().iter().zip(&self.energies) {
            let mut pow = e;
            for m in moments.iter_mut() {
                *m += pow;
                pow *= lam;
            }
        }
        moments
    }

    /// The h-step matrix from spectral moments:
    /// `⟨S^(s), S^(t)⟩ = m_{s+t}` and `⟨S^(s), L S^(t)⟩ = m_{s+t+1}`.
    pub fn normal_matrix(&self, order: usize, rho: f64) -> DMatrix<f64> {
        let m = self.spectral_moments(2 * order);
        DMatrix::from_fn(order, order, |s, t| 2.0 * m[s + t + 1] + rho * m[s + t])
    }

    /// `tr(F̃ᵀ L F̃) = Σ_i λ_i H(λ_i)² ‖F̂_i‖²`.
    fn smoothness(&self, h: &FilterCoefficients) -> f64 {
        self.decomp
            .eigenvalues()
            .iter()
            .zip(&self.energies)
            .map(|(&lam, &e)| {
                let r = h.response_at(lam);
                lam * r * r * e
            })
            .sum()
    }

    /// Random start: `h ~ U(0,1)^T` normalized and `V ~ U(0,1)^{N×P}`.
    pub fn initial_state(&self, cfg: &GrafhubConfig) -> Result<AdmmState> {
        let mut rng = stream_rng(cfg.seed, Stream::SolverInit);
        let taps: Vec<f64> = (0..cfg.filter_order).map(|_| rng.random::<f64>()).collect();
        let h = FilterCoefficients::normalized(taps)?;
        let (n, p) = self.signals.shape();
        let v = SignalMatrix::from_fn(n, p, |_, _| rng.random::<f64>());
        let shifted = self.prefix(cfg.filter_order);
        let filtered = shifted.combine(&h)?;
        Ok(AdmmState {
            z: SignalMatrix::zeros(n, p),
            v,
            h,
            filtered,
            iteration: 0,
            last_h_delta: f64::INFINITY,
        })
    }

    /// Runs the ADMM loop.
    pub fn fit(&self, cfg: &GrafhubConfig) -> Result<GrafhubResult> {
        cfg.validate()?;
        if cfg.filter_order > self.max_order() {
            return Err(Error::invalid(
                "filter_order",
                format!("{} exceeds the precomputed order {}", cfg.filter_order, self.max_order()),
            ));
        }
        let mut state = self.initial_state(cfg)?;
        if self.signals.iter().all(|&x| x == 0.0) {
            // Every unit filter maps zero signals to zero.
            return Ok(GrafhubResult {
                h: state.h,
                filtered: self.signals.clone(),
                residual: self.signals.clone(),
                iterations: 0,
                converged: true,
                objective_trace: Vec::new(),
                primal_residual_trace: Vec::new(),
            });
        }
        let shifted = self.prefix(cfg.filter_order);
        let system = NormalEquations::new(self.normal_matrix(cfg.filter_order, cfg.rho))?;

        let mut objective_trace = Vec::new();
        let mut primal_residual_trace = Vec::new();
        let mut converged = false;
        while state.iteration < cfg.max_iter {
            let primal = self.step(&shifted, &system, &mut state, cfg)?;
            let l1: f64 = self
                .signals
                .iter()
                .zip(state.filtered.iter())
                .map(|(a, b)| (a - b).abs())
                .sum();
            let obj = cfg.alpha * l1 + self.smoothness(&state.h);
            if !obj.is_finite() || !primal.is_finite() {
                return Err(Error::NonFiniteObjective {
                    iteration: state.iteration,
                });
            }
            objective_trace.push(obj);
            primal_residual_trace.push(primal);
            if state.last_h_delta <= cfg.tol {
                converged = true;
                break;
            }
        }
        if !converged {
            log::warn!(
                "ADMM stopped at max_iter = {} with ‖Δh‖² = {:.3e}",
                cfg.max_iter,
                state.last_h_delta
            );
        }
        let residual = self.signals - &state.filtered;
        Ok(GrafhubResult {
            h: state.h,
            filtered: state.filtered,
            residual,
            iterations: state.iteration,
            converged,
            objective_trace,
            primal_residual_trace,
        })
    }

    /// One Z/h/V sweep; returns the primal residual norm after the sweep.
    fn step(
        &self,
        shifted: &ShiftedSignals,
        system: &NormalEquations,
        state: &mut AdmmState,
        cfg: &GrafhubConfig,
    ) -> Result<f64> {
        let f = self.signals;
        state.z = prox_l1(f, &state.filtered, &state.v, cfg.alpha / cfg.rho);
        let gap = &state.z - f + &state.v;
        let b = assemble_b_from_gap(shifted, &gap, cfg.rho)?;
        let h_new = project_unit(system.solve(&b)?)?;
        let delta: f64 = h_new
            .as_slice()
            .iter()
            .zip(state.h.as_slice())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        state.filtered = shifted.combine(&h_new)?;
        let primal = &state.z - f + &state.filtered;
        let dual_step = match cfg.dual_scaling {
            DualScaling::Scaled => 1.0,
            DualScaling::Rho => cfg.rho,
        };
        state.v.zip_apply(&primal, |v, r| *v += dual_step * r);
        state.h = h_new;
        state.last_h_delta = delta;
        state.iteration += 1;
        Ok(primal.norm())
    }

    /// Runs `count` sweeps from `state` and returns the states visited.
    pub fn iterate(&self, cfg: &GrafhubConfig, count: usize) -> Result<Vec<AdmmState>> {
        cfg.validate()?;
        let shifted = self.prefix(cfg.filter_order);
        let system = NormalEquations::new(self.normal_matrix(cfg.filter_order, cfg.rho))?;
        let mut state = self.initial_state(cfg)?;
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            self.step(&shifted, &system, &mut state, cfg)?;
            out.push(state.clone());
        }
        Ok(out)
    }
}

/// Fits the filter on `g` from scratch.
pub fn fit(g: &Graph, f: &SignalMatrix, cfg: &GrafhubConfig) -> Result<GrafhubResult> {
    cfg.validate()?;
    if f.nrows() != g.n_nodes() {
        return Err(Error::DimensionMismatch {
            context: "signal rows vs graph nodes",
            expected: g.n_nodes(),
            found: f.nrows(),
        });
    }
    let decomp = SpectralDecomposition::of_graph(g)?;
    GrafhubProblem::new(&decomp, f, cfg.filter_order)?.fit(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soft_threshold_hand_cases() {
        assert!((soft_threshold(1.2, 0.5) - 0.7).abs() < 1e-15);
        assert_eq!(soft_threshold(0.3, 0.5), 0.0);
        assert!((soft_threshold(-1.2, 0.5) + 0.7).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        assert!(GrafhubConfig::default().validate().is_ok());
        let bad = GrafhubConfig {
            filter_order: 1,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = GrafhubConfig {
            rho: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn singular_system_is_reported() {
        let y = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let err = NormalEquations::new(y).unwrap_err();
        assert!(err.to_string().contains("smaller filter order"));
        assert!(err.is_numerical());
    }

    #[test]
    fn zero_signals_short_circuit() {
        let g = Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let f = SignalMatrix::zeros(3, 2);
        let res = fit(&g, &f, &GrafhubConfig::default()).unwrap();
        assert!(res.converged);
        assert_eq!(res.filtered, f);
        assert_eq!(res.residual, f);
        assert!((res.h.norm() - 1.0).abs() < 1e-12);
    }
}
