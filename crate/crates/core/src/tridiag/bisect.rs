//! Sturm counts and bisection for unit-off-diagonal Jacobi matrices.

use super::TridiagonalMatrix;
use crate::error::{Error, Result};

// Intervals holding more eigenvalues than this are split on two workers.
const PAR_SPLIT: usize = 64;

/// Pivots with magnitude below this are replaced by `-floor`.
pub fn pivot_floor(a: &TridiagonalMatrix) -> f64 {
    let (lo, hi) = a.gershgorin();
    f64::EPSILON * (hi - lo)
}

/// Number of eigenvalues in `(-∞, x]`.
///
/// Counts negative pivots of the LDLᵀ factorization of `A - xI`:
/// `q_1 = d_1 - x`, `q_{k+1} = (d_{k+1} - x) - 1/q_k`.
pub fn sturm_count(a: &TridiagonalMatrix, x: f64) -> usize {
    count_with_floor(a.diag(), x, pivot_floor(a))
}

#[inline]
fn count_with_floor(diag: &[f64], x: f64, floor: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0f64;
    for (k, &d) in diag.iter().enumerate() {
        q = if k == 0 { d - x } else { (d - x) - 1.0 / q };
        if q.abs() < floor {
            q = -floor;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Eigenvalues `λ_1 < … < λ_n`, each within `certified_radius` of a true
/// eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueList {
    pub values: Vec<f64>,
    pub certified_radius: f64,
    /// Eigenvalues that bisection could not separate from a neighbour before
    /// reaching round-off; they appear as repeated values.
    pub unresolved: usize,
}

impl EigenvalueList {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// `#{i : values[i] ≤ x}`.
    pub fn count_le(&self, x: f64) -> usize {
        self.values.partition_point(|&v| v <= x)
    }

    /// Whether `x` is farther than the certified radius from every value.
    pub fn is_resolved(&self, x: f64) -> bool {
        let i = self.values.partition_point(|&v| v < x);
        let near = |j: usize| (self.values[j] - x).abs() <= self.certified_radius;
        !(i < self.values.len() && near(i) || i > 0 && near(i - 1))
    }

    pub fn min_gap(&self) -> Option<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).reduce(f64::min)
    }
}

struct Bisector<'a> {
    diag: &'a [f64],
    floor: f64,
    tol: f64,
}

impl Bisector<'_> {
    fn count(&self, x: f64) -> usize {
        count_with_floor(self.diag, x, self.floor)
    }

    fn at_roundoff(lo: f64, hi: f64) -> bool {
        hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs())
    }

    /// Emits `(midpoint, half_width, resolved)` for every eigenvalue in
    /// `(lo, hi]`, given `count(lo) = c_lo` and `count(hi) = c_hi`.
    fn solve(&self, lo: f64, hi: f64, c_lo: usize, c_hi: usize, out: &mut Vec<(f64, f64, bool)>) {
        let inside = c_hi - c_lo;
        if inside == 0 {
            return;
        }
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        if inside == 1 && hi - lo <= self.tol {
            out.push((mid, half, true));
            return;
        }
        if Self::at_roundoff(lo, hi) || mid <= lo || mid >= hi {
            let resolved = inside == 1;
            out.extend(std::iter::repeat((mid, half, resolved)).take(inside));
            return;
        }
        let c_mid = self.count(mid).clamp(c_lo, c_hi);
        if inside > PAR_SPLIT {
            let (mut left, right) = rayon::join(
                || {
                    let mut v = Vec::new();
                    self.solve(lo, mid, c_lo, c_mid, &mut v);
                    v
                },
                || {
                    let mut v = Vec::new();
                    self.solve(mid, hi, c_mid, c_hi, &mut v);
                    v
                },
            );
            left.extend(right);
            out.extend(left);
        } else {
            self.solve(lo, mid, c_lo, c_mid, out);
            self.solve(mid, hi, c_mid, c_hi, out);
        }
    }
}

/// All eigenvalues by bisection on [`sturm_count`], started from the
/// Gershgorin interval.
///
/// A single eigenvalue is accepted once its bracket is no wider than `tol`,
/// or when the bracket reaches round-off width. The result does not depend
/// on the number of worker threads.
pub fn eigenvalues(a: &TridiagonalMatrix, tol: f64) -> Result<EigenvalueList> {
    let (g_lo, g_hi) = a.gershgorin();
    let width = g_hi - g_lo;
    let floor = 16.0 * f64::EPSILON * width;
    if !(tol > 0.0) || tol < floor {
        return Err(Error::TolTooSmall { tol, floor });
    }
    let b = Bisector { diag: a.diag(), floor: pivot_floor(a), tol };
    let n = a.dim();

    let mut pad = 4.0 * f64::EPSILON * width.max(1.0);
    let (mut lo, mut hi) = (g_lo - pad, g_hi + pad);
    while b.count(lo) != 0 || b.count(hi) != n {
        pad *= 2.0;
        lo = g_lo - pad;
        hi = g_hi + pad;
    }

    let mut found = Vec::with_capacity(n);
    b.solve(lo, hi, 0, n, &mut found);
    debug_assert_eq!(found.len(), n);

    let certified_radius = found.iter().map(|e| e.1).fold(0.0, f64::max);
    let unresolved = found.iter().filter(|e| !e.2).count();
    Ok(EigenvalueList { values: found.into_iter().map(|e| e.0).collect(), certified_radius, unresolved })
}
