//! Moments of `μ_T` from two independent sides: Cesàro averages of
//! eigenvalue powers, and Birkhoff averages of the diagonal of `T^k`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;
use crate::potentials::{sample_sequence, PotentialSpec};
use crate::tridiag::{build_unilateral, eigenvalues};

// Fixed block size for the moment reduction; independent of thread count.
const BLOCK: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct TraceMoments {
    /// `moments[k]` estimates `∫ x^k dμ_T`.
    pub moments: Vec<f64>,
    pub window_radius: usize,
    pub margin: usize,
}

/// `⟨T^k e_j, e_j⟩` for `k = 0..=K`, where `window` holds `d_{j-K}..d_{j+K}`.
///
/// The vector `T^t e_j` is propagated on the local window; after `t` steps it
/// is supported within distance `t` of `j`, so nothing is truncated.
fn diagonal_powers(window: &[f64], k_max: usize, out: &mut [f64]) {
    let len = window.len();
    let center = k_max;
    let mut w = vec![0.0; len];
    let mut next = vec![0.0; len];
    w[center] = 1.0;
    out[0] = 1.0;
    for t in 1..=k_max {
        let lo = center - (t - 1);
        let hi = center + (t - 1);
        next.iter_mut().for_each(|x| *x = 0.0);
        for i in lo..=hi {
            let v = w[i];
            if v == 0.0 {
                continue;
            }
            next[i] += window[i] * v;
            next[i - 1] += v;
            next[i + 1] += v;
        }
        std::mem::swap(&mut w, &mut next);
        out[t] = w[center];
    }
}

/// Birkhoff averages `(2R+1)⁻¹ Σ_{|j|≤R} ⟨T^k e_j, e_j⟩`, `k ≤ K`.
///
/// Paths are summed exactly over `[-R-K, R+K]`; `m_0` is exactly 1.
pub fn trace_moments(spec: &PotentialSpec, k_max: usize, window_radius: usize) -> Result<TraceMoments> {
    if window_radius <= k_max {
        return Err(Error::InvalidArgument(format!(
            "window_radius ({window_radius}) must exceed K ({k_max})"
        )));
    }
    let r = window_radius as i64;
    let margin = k_max;
    let diag = sample_sequence(spec, -r - margin as i64, r + margin as i64)?;
    let count = 2 * window_radius + 1;

    // Per-block compensated partial sums, combined in block order.
    let partials: Vec<Vec<f64>> = (0..count)
        .step_by(BLOCK)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|start| {
            let end = (start + BLOCK).min(count);
            let mut per_k = vec![Vec::with_capacity(end - start); k_max + 1];
            let mut buf = vec![0.0; k_max + 1];
            for j in start..end {
                // diag index of site j is j + margin
                diagonal_powers(&diag[j..j + 2 * margin + 1], k_max, &mut buf);
                for (k, v) in buf.iter().enumerate() {
                    per_k[k].push(*v);
                }
            }
            per_k.into_iter().map(compensated_sum).collect()
        })
        .collect();

    let mut moments: Vec<f64> = (0..=k_max)
        .map(|k| compensated_sum(partials.iter().map(|p| p[k])) / count as f64)
        .collect();
    moments[0] = 1.0;
    Ok(TraceMoments { moments, window_radius, margin })
}

/// `n⁻¹ Σ λ_i^k` for `k = 0..=K`, from an eigenvalue list.
pub fn cesaro_moments(values: &[f64], k_max: usize) -> Vec<f64> {
    let n = values.len() as f64;
    let mut out = vec![0.0; k_max + 1];
    out[0] = 1.0;
    for (k, slot) in out.iter_mut().enumerate().skip(1) {
        *slot = compensated_sum(values.iter().map(|&x| x.powi(k as i32))) / n;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRow {
    pub k: usize,
    pub cesaro: f64,
    pub trace: f64,
    pub abs_diff: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub n: usize,
    pub window_radius: usize,
    /// A row is flagged when `abs_diff > flag_tol · max(1, |trace|)`.
    pub flag_tol: f64,
    pub rows: Vec<MomentRow>,
}

impl MomentReport {
    pub fn any_flagged(&self) -> bool {
        self.rows.iter().any(|r| r.flagged)
    }
}

/// Compares Cesàro moments of `T_n` (largest `n` in `schedule`) against the
/// Birkhoff trace moments.
pub fn moment_match(
    spec: &PotentialSpec,
    schedule: &[usize],
    k_max: usize,
    window_radius: usize,
    eig_tol: f64,
    flag_tol: f64,
) -> Result<MomentReport> {
    let &n = schedule
        .iter()
        .max()
        .ok_or_else(|| Error::InvalidArgument("schedule must be nonempty".into()))?;
    let eigs = eigenvalues(&build_unilateral(spec, n)?, eig_tol)?;
    let cesaro = cesaro_moments(&eigs.values, k_max);
    let trace = trace_moments(spec, k_max, window_radius)?.moments;
    let rows = (0..=k_max)
        .map(|k| {
            let abs_diff = (cesaro[k] - trace[k]).abs();
            MomentRow {
                k,
                cesaro: cesaro[k],
                trace: trace[k],
                abs_diff,
                flagged: abs_diff > flag_tol * trace[k].abs().max(1.0),
            }
        })
        .collect();
    Ok(MomentReport { n, window_radius, flag_tol, rows })
}
