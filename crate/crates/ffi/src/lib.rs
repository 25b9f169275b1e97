//! C ABI over the grafhub library.
//!
//! Handles are opaque pointers created by `*_new`/`grafhub_fit` and released
//! with the matching `*_free`. Every fallible call returns a
//! [`GrafhubStatus`]; on failure, [`grafhub_last_error_message`] describes
//! the error on the calling thread. Matrices are passed row-major.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use grafhub::eval::metrics::auc_roc;
use grafhub::grafhub::{DualScaling, GrafhubConfig, GrafhubProblem};
use grafhub::scoring::{score_reconstruction, score_smoothness};
use grafhub::{Error, Graph, SignalMatrix, SpectralDecomposition};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrafhubStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad shapes, parameters or graph data.
    InvalidInput = 2,
    /// Solver or eigensolver failure.
    Numerical = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrafhubMetric {
    ReconstructionError = 0,
    Smoothness = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrafhubSolverConfig {
    pub alpha: f64,
    pub rho: f64,
    pub filter_order: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
    /// Nonzero selects the `V += ρ r` dual step.
    pub rho_dual: u8,
}

impl From<&GrafhubSolverConfig> for GrafhubConfig {
    fn from(c: &GrafhubSolverConfig) -> Self {
        GrafhubConfig {
            alpha: c.alpha,
            rho: c.rho,
            filter_order: c.filter_order,
            max_iter: c.max_iter,
            tol: c.tol,
            seed: c.seed,
            dual_scaling: if c.rho_dual != 0 { DualScaling::Rho } else { DualScaling::Scaled },
        }
    }
}

/// Opaque graph handle.
pub struct GrafhubGraph {
    graph: Graph,
}

/// Opaque handle holding a fitted filter and both hub score vectors.
pub struct GrafhubFit {
    h: Vec<f64>,
    iterations: usize,
    converged: bool,
    reconstruction: Vec<f64>,
    smoothness: Vec<f64>,
    filtered: SignalMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> GrafhubStatus {
    if e.is_numerical() {
        GrafhubStatus::Numerical
    } else {
        GrafhubStatus::InvalidInput
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), (GrafhubStatus, String)>) -> GrafhubStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            GrafhubStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            GrafhubStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (GrafhubStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (GrafhubStatus, String) {
    (GrafhubStatus::NullPointer, format!("`{what}` is null"))
}

/// Borrows `len` elements; a zero length accepts a null pointer.
unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], (GrafhubStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// Message for the most recent failure on this thread; empty after a
/// success. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn grafhub_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn grafhub_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn grafhub_solver_config_default() -> GrafhubSolverConfig {
    let d = GrafhubConfig::default();
    GrafhubSolverConfig {
        alpha: d.alpha,
        rho: d.rho,
        filter_order: d.filter_order,
        max_iter: d.max_iter,
        tol: d.tol,
        seed: d.seed,
        rho_dual: 0,
    }
}

/// Builds a graph from a row-major `n × n` symmetric adjacency matrix.
///
/// # Safety
/// `adjacency` must point to `n * n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn grafhub_graph_from_adjacency(
    n: usize,
    adjacency: *const f64,
    out: *mut *mut GrafhubGraph,
) -> GrafhubStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let len = n.checked_mul(n).ok_or((GrafhubStatus::InvalidInput, "n is too large".into()))?;
        let data = slice(adjacency, len, "adjacency")?;
        let graph = Graph::from_adjacency(nalgebra_row_major(n, n, data)).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(GrafhubGraph { graph }));
        Ok(())
    })
}

/// Builds a graph on `n` nodes from `m` undirected edges. `weight` may be
/// null for unit weights.
///
/// # Safety
/// `src` and `dst` must point to `m` values, `weight` to `m` doubles or be
/// null; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn grafhub_graph_from_edges(
    n: usize,
    m: usize,
    src: *const usize,
    dst: *const usize,
    weight: *const f64,
    out: *mut *mut GrafhubGraph,
) -> GrafhubStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let s = slice(src, m, "src")?;
        let d = slice(dst, m, "dst")?;
        let w = if weight.is_null() { None } else { Some(slice(weight, m, "weight")?) };
        let edges: Vec<(usize, usize, f64)> = (0..m).map(|i| (s[i], d[i], w.map_or(1.0, |w| w[i]))).collect();
        let graph = Graph::from_edges(n, &edges).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(GrafhubGraph { graph }));
        Ok(())
    })
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn grafhub_graph_n_nodes(graph: *const GrafhubGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.n_nodes())
}

/// # Safety
/// `graph` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn grafhub_graph_free(graph: *mut GrafhubGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

fn nalgebra_row_major(rows: usize, cols: usize, data: &[f64]) -> SignalMatrix {
    SignalMatrix::from_row_slice(rows, cols, data)
}

/// Learns the filter for row-major signals (`n_rows` must equal the node
/// count) and scores every node both ways.
///
/// # Safety
/// `graph` must be a live handle, `signals` must point to
/// `n_rows * n_cols` doubles, `config` may be null for defaults, and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn grafhub_fit(
    graph: *const GrafhubGraph,
    signals: *const f64,
    n_rows: usize,
    n_cols: usize,
    config: *const GrafhubSolverConfig,
    out: *mut *mut GrafhubFit,
) -> GrafhubStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let g = &graph.as_ref().ok_or_else(|| null("graph"))?.graph;
        let len = n_rows
            .checked_mul(n_cols)
            .ok_or((GrafhubStatus::InvalidInput, "signal shape overflows".into()))?;
        let f = nalgebra_row_major(n_rows, n_cols, slice(signals, len, "signals")?);
        if n_rows != g.n_nodes() {
            return Err(lib_err(Error::DimensionMismatch {
                context: "signal rows vs graph nodes",
                expected: g.n_nodes(),
                found: n_rows,
            }));
        }
        let cfg: GrafhubConfig = match config.as_ref() {
            Some(c) => c.into(),
            None => GrafhubConfig::default(),
        };
        cfg.validate().map_err(lib_err)?;
        let decomp = SpectralDecomposition::of_graph(g).map_err(lib_err)?;
        let fit = GrafhubProblem::new(&decomp, &f, cfg.filter_order)
            .and_then(|p| p.fit(&cfg))
            .map_err(lib_err)?;
        let reconstruction = score_reconstruction(&f, &fit.filtered).map_err(lib_err)?.scores;
        let smoothness = score_smoothness(g, &f, &fit.filtered).map_err(lib_err)?.scores;
        *out = Box::into_raw(Box::new(GrafhubFit {
            h: fit.h.as_slice().to_vec(),
            iterations: fit.iterations,
            converged: fit.converged,
            reconstruction,
            smoothness,
            filtered: fit.filtered,
        }));
        Ok(())
    })
}

/// # Safety
/// `fit` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn grafhub_fit_free(fit: *mut GrafhubFit) {
    if !fit.is_null() {
        drop(Box::from_raw(fit));
    }
}

/// Filter order T, or 0 for a null handle.
///
/// # Safety
/// `fit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn grafhub_fit_order(fit: *const GrafhubFit) -> usize {
    fit.as_ref().map_or(0, |f| f.h.len())
}

/// ADMM sweeps run, or 0 for a null handle.
///
/// # Safety
/// `fit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn grafhub_fit_iterations(fit: *const GrafhubFit) -> usize {
    fit.as_ref().map_or(0, |f| f.iterations)
}

/// 1 if the stopping rule was met before the iteration cap.
///
/// # Safety
/// `fit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn grafhub_fit_converged(fit: *const GrafhubFit) -> u8 {
    fit.as_ref().map_or(0, |f| u8::from(f.converged))
}

unsafe fn copy_out(src: &[f64], out: *mut f64, len: usize) -> Result<(), (GrafhubStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    if len < src.len() {
        return Err((
            GrafhubStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    Ok(())
}

/// Copies the unit-norm filter taps into `out` (capacity `len`).
///
/// # Safety
/// `fit` must be a live handle and `out` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn grafhub_fit_coefficients(fit: *const GrafhubFit, out: *mut f64, len: usize) -> GrafhubStatus {
    guard(|| {
        let f = fit.as_ref().ok_or_else(|| null("fit"))?;
        copy_out(&f.h, out, len)
    })
}

/// Copies one hub score per node into `out` (capacity `len`).
///
/// # Safety
/// `fit` must be a live handle and `out` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn grafhub_fit_scores(
    fit: *const GrafhubFit,
    metric: GrafhubMetric,
    out: *mut f64,
    len: usize,
) -> GrafhubStatus {
    guard(|| {
        let f = fit.as_ref().ok_or_else(|| null("fit"))?;
        let src = match metric {
            GrafhubMetric::ReconstructionError => &f.reconstruction,
            GrafhubMetric::Smoothness => &f.smoothness,
        };
        copy_out(src, out, len)
    })
}

/// Copies the filtered (normal-activity) signals, row-major, into `out`.
///
/// # Safety
/// `fit` must be a live handle and `out` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn grafhub_fit_filtered(fit: *const GrafhubFit, out: *mut f64, len: usize) -> GrafhubStatus {
    guard(|| {
        let f = fit.as_ref().ok_or_else(|| null("fit"))?;
        let row_major: Vec<f64> = f.filtered.transpose().iter().copied().collect();
        copy_out(&row_major, out, len)
    })
}

/// Rank-based AUC of `scores` against 0/1 `labels`.
///
/// # Safety
/// `scores` and `labels` must point to `n` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn grafhub_auc(scores: *const f64, labels: *const u8, n: usize, out: *mut f64) -> GrafhubStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let s = slice(scores, n, "scores")?;
        let l: Vec<bool> = slice(labels, n, "labels")?.iter().map(|&x| x != 0).collect();
        *out = auc_roc(s, &l).map_err(lib_err)?;
        Ok(())
    })
}
