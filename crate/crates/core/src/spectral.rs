//! Graph Fourier basis of the normalized Laplacian and spectral filtering.
//!
//! Every filter in this crate is applied as `U diag(g(λ)) Uᵀ F`, where the
//! columns of `U` are Laplacian eigenvectors. Polynomial filters
//! `H(L) = Σ_t h_t Lᵗ` use the gain `H(λ) = Σ_t h_t λᵗ`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{normalized_laplacian, Graph};

/// Node signals: one row per node, one column per observation.
pub type SignalMatrix = DMatrix<f64>;

const SYMMETRY_TOL: f64 = 1e-10;
const EIGEN_EPS: f64 = 1e-14;
const EIGEN_MAX_ITER: usize = 100_000;

/// Eigenvalues (ascending) and matching orthonormal eigenvectors (columns).
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

/// Eigendecomposition of a symmetric matrix with eigenvalues sorted ascending.
pub fn spectral_decompose(l: &DMatrix<f64>) -> Result<SpectralDecomposition> {
    let (rows, cols) = l.shape();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    if l.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("laplacian"));
    }
    for i in 0..rows {
        for j in (i + 1)..rows {
            if (l[(i, j)] - l[(j, i)]).abs() > SYMMETRY_TOL {
                return Err(Error::NotSymmetric {
                    i,
                    j,
                    a: l[(i, j)],
                    b: l[(j, i)],
                });
            }
        }
    }
    let eig = SymmetricEigen::try_new(l.clone(), EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or(Error::EigenNonConvergence)?;

    let mut order: Vec<usize> = (0..rows).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = DVector::from_iterator(rows, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut eigenvectors = DMatrix::zeros(rows, rows);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

impl SpectralDecomposition {
    /// Decomposes the normalized Laplacian of `g`.
    pub fn of_graph(g: &Graph) -> Result<Self> {
        spectral_decompose(&normalized_laplacian(g))
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// `U diag(gains) Uᵀ F`.
    pub fn apply_gains(&self, gains: &[f64], f: &SignalMatrix) -> Result<SignalMatrix> {
        check_rows("spectral filter input", self.n(), f.nrows())?;
        check_rows("spectral gains", self.n(), gains.len())?;
        let mut coeffs = self.eigenvectors.tr_mul(f);
        for (mut row, &g) in coeffs.row_iter_mut().zip(gains) {
            row *= g;
        }
        Ok(&self.eigenvectors * coeffs)
    }

    /// Reassembles `U diag(λ) Uᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut scaled = self.eigenvectors.clone();
        for (mut col, &lam) in scaled.column_iter_mut().zip(self.eigenvalues.iter()) {
            col *= lam;
        }
        scaled * self.eigenvectors.transpose()
    }
}

fn check_rows(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        });
    }
    Ok(())
}

/// Graph Fourier transform `Uᵀ F`.
pub fn gft(decomp: &SpectralDecomposition, f: &SignalMatrix) -> Result<SignalMatrix> {
    check_rows("gft", decomp.n(), f.nrows())?;
    Ok(decomp.eigenvectors.tr_mul(f))
}

/// Inverse graph Fourier transform `U F̂`.
pub fn inverse_gft(decomp: &SpectralDecomposition, coeffs: &SignalMatrix) -> Result<SignalMatrix> {
    check_rows("inverse gft", decomp.n(), coeffs.nrows())?;
    Ok(&decomp.eigenvectors * coeffs)
}

/// `tr(Fᵀ L F)`.
pub fn total_variation(l: &DMatrix<f64>, f: &SignalMatrix) -> Result<f64> {
    if l.nrows() != l.ncols() {
        return Err(Error::NotSquare {
            rows: l.nrows(),
            cols: l.ncols(),
        });
    }
    check_rows("total variation", l.nrows(), f.nrows())?;
    Ok(f.dot(&(l * f)))
}

/// Polynomial filter taps `h_0 .. h_{T-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FilterCoefficients(Vec<f64>);

impl FilterCoefficients {
    pub fn new(taps: Vec<f64>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::invalid("filter_order", "need at least one tap"));
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("filter coefficients"));
        }
        Ok(Self(taps))
    }

    /// Taps rescaled to unit Euclidean norm.
    pub fn normalized(taps: Vec<f64>) -> Result<Self> {
        let mut h = Self::new(taps)?;
        h.normalize()?;
        Ok(h)
    }

    pub(crate) fn normalize(&mut self) -> Result<()> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::invalid("filter coefficients", "cannot normalize a zero vector"));
        }
        self.0.iter_mut().for_each(|t| *t /= norm);
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|t| t * t).sum::<f64>().sqrt()
    }

    /// `H(λ) = Σ_t h_t λᵗ` by Horner's rule.
    pub fn response_at(&self, lambda: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &h| acc * lambda + h)
    }
}

/// Frequency response `H(λ_i)` at each eigenvalue.
pub fn filter_response(h: &FilterCoefficients, eigenvalues: &[f64]) -> Vec<f64> {
    eigenvalues.iter().map(|&lam| h.response_at(lam)).collect()
}

/// `U H(Λ) Uᵀ F`.
pub fn apply_filter(
    decomp: &SpectralDecomposition,
    h: &FilterCoefficients,
    f: &SignalMatrix,
) -> Result<SignalMatrix> {
    let gains = filter_response(h, decomp.eigenvalues.as_slice());
    decomp.apply_gains(&gains, f)
}

/// The shifted signals `S^(t) = Lᵗ F` for `t = 0 .. T-1`.
#[derive(Debug, Clone)]
pub struct ShiftedSignals {
    shifts: Vec<SignalMatrix>,
}

impl ShiftedSignals {
    pub fn order(&self) -> usize {
        self.shifts.len()
    }

    pub fn get(&self, t: usize) -> &SignalMatrix {
        &self.shifts[t]
    }

    pub fn iter(&self) -> impl Iterator<Item = &SignalMatrix> {
        self.shifts.iter()
    }

    /// The first `order` shifts.
    pub fn prefix(&self, order: usize) -> ShiftedSignals {
        ShiftedSignals {
            shifts: self.shifts[..order.min(self.shifts.len())].to_vec(),
        }
    }

    /// `Σ_t h_t S^(t)`; `h` may be shorter than the available order.
    pub fn combine(&self, h: &FilterCoefficients) -> Result<SignalMatrix> {
        if h.order() > self.order() {
            return Err(Error::DimensionMismatch {
                context: "filter order vs shifted signals",
                expected: self.order(),
                found: h.order(),
            });
        }
        let mut out = self.shifts[0].clone() * h.as_slice()[0];
        for (s, &ht) in self.shifts.iter().zip(h.as_slice()).skip(1) {
            out.zip_apply(s, |o, x| *o += ht * x);
        }
        Ok(out)
    }
}

/// Computes `S^(t) = U Λᵗ Uᵀ F` for `t < order`. `S^(0)` is `F` itself.
pub fn compute_shifted_signals(
    decomp: &SpectralDecomposition,
    f: &SignalMatrix,
    order: usize,
) -> Result<ShiftedSignals> {
    if order < 1 {
        return Err(Error::invalid("filter_order", "must be at least 1"));
    }
    check_rows("shifted signals", decomp.n(), f.nrows())?;
    let mut shifts = Vec::with_capacity(order);
    shifts.push(f.clone());
    let mut coeffs = decomp.eigenvectors.tr_mul(f);
    for _ in 1..order {
        for (mut row, &lam) in coeffs.row_iter_mut().zip(decomp.eigenvalues.iter()) {
            row *= lam;
        }
        shifts.push(&decomp.eigenvectors * &coeffs);
    }
    Ok(ShiftedSignals { shifts })
}
