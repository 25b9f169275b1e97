use serde::Serialize;

use crate::baselines::centrality::shortest_paths_from;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::{gft, SignalMatrix, SpectralDecomposition};

/// 1-based ranks with ties sharing their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start..end hold ranks start+1 ..= end.
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

/// Rank-based (Mann–Whitney) AUC; tied positive/negative pairs count ½.
pub fn auc_roc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            context: "scores vs labels",
            expected: labels.len(),
            found: scores.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::NonFinite("scores"));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    let ranks = average_ranks(scores);
    let rank_sum: f64 = ranks.iter().zip(labels).filter(|(_, &l)| l).map(|(r, _)| r).sum();
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// Spearman rank correlation; 0 when either side is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            context: "spearman inputs",
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::invalid("spearman", "needs at least 2 points"));
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(0.0);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Spectral energy distribution of a signal matrix.
#[derive(Debug, Clone, Serialize)]
pub struct SedProfile {
    pub eigenvalues: Vec<f64>,
    pub sed: Vec<f64>,
    /// `Σ_{λ≥1} SED / Σ_{λ<1} SED`; infinite when no energy lies below 1.
    pub sed_ratio: f64,
    pub skipped_columns: usize,
}

/// Per column, the normalized squared GFT coefficients, averaged over the
/// columns with nonzero energy.
pub fn sed_profile(decomp: &SpectralDecomposition, f: &SignalMatrix) -> Result<SedProfile> {
    let coeffs = gft(decomp, f)?;
    let n = decomp.n();
    let mut sed = vec![0.0; n];
    let mut used = 0usize;
    for col in coeffs.column_iter() {
        let energy = col.norm_squared();
        if energy == 0.0 || !energy.is_finite() {
            continue;
        }
        used += 1;
        for (s, c) in sed.iter_mut().zip(col.iter()) {
            *s += c * c / energy;
        }
    }
    let skipped = coeffs.ncols() - used;
    if skipped > 0 {
        log::warn!("SED skipped {skipped} zero-energy column(s)");
    }
    if used == 0 {
        return Err(Error::invalid("signals", "every column has zero energy"));
    }
    sed.iter_mut().for_each(|s| *s /= used as f64);
    let eigenvalues: Vec<f64> = decomp.eigenvalues().iter().copied().collect();
    let (mut high, mut low) = (0.0, 0.0);
    for (&lam, &s) in eigenvalues.iter().zip(&sed) {
        if lam >= 1.0 {
            high += s;
        } else {
            low += s;
        }
    }
    let sed_ratio = if low > 0.0 { high / low } else { f64::INFINITY };
    Ok(SedProfile {
        eigenvalues,
        sed,
        sed_ratio,
        skipped_columns: skipped,
    })
}

/// Mean of `1/d_ij` over ordered pairs `i ≠ j`, with `1/∞ = 0`; lengths are
/// `1 / weight`.
pub fn global_efficiency(g: &Graph) -> Result<f64> {
    let n = g.n_nodes();
    if n < 2 {
        return Err(Error::invalid("n_nodes", "global efficiency needs at least 2 nodes"));
    }
    let total: f64 = (0..n)
        .map(|i| {
            shortest_paths_from(g, i)
                .iter()
                .enumerate()
                .filter(|&(j, d)| j != i && d.is_finite())
                .map(|(_, &d)| 1.0 / d)
                .sum::<f64>()
        })
        .sum();
    Ok(total / (n * (n - 1)) as f64)
}

/// `GE(g) − GE(g − i)` for each listed node.
pub fn knockout_delta_ge(g: &Graph, nodes: &[usize]) -> Result<Vec<f64>> {
    if g.n_nodes() < 3 {
        return Err(Error::invalid("n_nodes", "knockout needs at least 3 nodes"));
    }
    let base = global_efficiency(g)?;
    nodes
        .iter()
        .map(|&i| Ok(base - global_efficiency(&g.without_node(i)?)?))
        .collect()
}

/// `−Σ p_i log₂ p_i / log₂ M`, with `0 · log 0 = 0`.
pub fn normalized_entropy(counts: &[u64]) -> Result<f64> {
    if counts.len() < 2 {
        return Err(Error::invalid("counts", "need at least 2 bins"));
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::invalid("counts", "all counts are zero"));
    }
    let h: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total as f64;
            -p * p.log2()
        })
        .sum();
    Ok(h / (counts.len() as f64).log2())
}
