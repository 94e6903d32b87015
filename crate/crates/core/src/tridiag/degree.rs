//! Finite-window checks of the filtration degree `sup_k rank(P_k A - A P_k)`
//! for banded matrices, where `P_k` projects onto the first `k` coordinates.

use nalgebra::DMatrix;

use super::TridiagonalMatrix;
use crate::error::{Error, Result};

/// Square matrix with entries only on diagonals `-b..=b`.
///
/// `bands[o + b][i]` holds entry `(i, i + o)` for `o ≥ 0` and
/// `(i - o, i)` for `o < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    dim: usize,
    bandwidth: usize,
    bands: Vec<Vec<f64>>,
}

impl BandedMatrix {
    pub fn new(dim: usize, bandwidth: usize, bands: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("banded matrix dimension must be positive".into()));
        }
        if bands.len() != 2 * bandwidth + 1 {
            return Err(Error::InvalidArgument(format!(
                "expected {} bands for bandwidth {bandwidth}, got {}",
                2 * bandwidth + 1,
                bands.len()
            )));
        }
        for (idx, band) in bands.iter().enumerate() {
            let offset = idx.abs_diff(bandwidth);
            if band.len() != dim.saturating_sub(offset) {
                return Err(Error::InvalidArgument(format!(
                    "band at offset {offset} has length {}, expected {}",
                    band.len(),
                    dim.saturating_sub(offset)
                )));
            }
        }
        Ok(Self { dim, bandwidth, bands })
    }

    pub fn diagonal(diag: Vec<f64>) -> Result<Self> {
        let dim = diag.len();
        Self::new(dim, 0, vec![diag])
    }

    /// Tridiagonal with sub-diagonal `lower`, diagonal `diag`, super-diagonal `upper`.
    pub fn tridiagonal(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let dim = diag.len();
        Self::new(dim, 1, vec![lower, diag, upper])
    }

    pub fn from_jacobi(a: &TridiagonalMatrix) -> Self {
        let n = a.dim();
        Self { dim: n, bandwidth: 1, bands: vec![vec![1.0; n - 1], a.diag().to_vec(), vec![1.0; n - 1]] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let offset = j as i64 - i as i64;
        if offset.unsigned_abs() as usize > self.bandwidth {
            return 0.0;
        }
        let band = &self.bands[(offset + self.bandwidth as i64) as usize];
        band[i.min(j)]
    }

    /// Banded product; the bandwidths add.
    pub fn mul(&self, other: &BandedMatrix) -> Result<BandedMatrix> {
        if self.dim != other.dim {
            return Err(Error::InvalidArgument("dimension mismatch in banded product".into()));
        }
        let n = self.dim;
        let b = (self.bandwidth + other.bandwidth).min(n - 1);
        let mut bands: Vec<Vec<f64>> = (0..=2 * b).map(|idx| vec![0.0; n - idx.abs_diff(b)]).collect();
        for i in 0..n {
            let j_lo = i.saturating_sub(b);
            let j_hi = (i + b).min(n - 1);
            for j in j_lo..=j_hi {
                let l_lo = i.saturating_sub(self.bandwidth).max(j.saturating_sub(other.bandwidth));
                let l_hi = (i + self.bandwidth).min(j + other.bandwidth).min(n - 1);
                let s: f64 = (l_lo..=l_hi).map(|l| self.get(i, l) * other.get(l, j)).sum();
                let offset = j as i64 - i as i64;
                bands[(offset + b as i64) as usize][i.min(j)] = s;
            }
        }
        Ok(BandedMatrix { dim: n, bandwidth: b, bands })
    }

    pub fn inf_norm(&self) -> f64 {
        (0..self.dim)
            .map(|i| {
                let lo = i.saturating_sub(self.bandwidth);
                let hi = (i + self.bandwidth).min(self.dim - 1);
                (lo..=hi).map(|j| self.get(i, j).abs()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeReport {
    /// `ranks[k-1]` = numerical rank of `P_k A - A P_k`.
    pub ranks: Vec<usize>,
    /// `lower_ranks[k-1]` = numerical rank of the cut block `(I - P_k) A P_k`.
    /// For symmetric `A` the commutator rank is twice this.
    pub lower_ranks: Vec<usize>,
    pub degree_window: usize,
    pub rank_tol: f64,
}

/// Numerical ranks of the commutators `P_k A - A P_k` for `k = 1..=K`.
///
/// Singular values above `N · ε · ‖A‖_∞ · 10` count toward the rank.
pub fn filtration_degree_window(a: &BandedMatrix, k_max: usize) -> Result<DegreeReport> {
    let n = a.dim();
    if k_max < 1 || k_max >= n {
        return Err(Error::InvalidArgument(format!("K must satisfy 1 ≤ K < N = {n}, got {k_max}")));
    }
    let rank_tol = n as f64 * f64::EPSILON * a.inf_norm() * 10.0;
    let dense = a.to_dense();
    let rank = |m: DMatrix<f64>| m.singular_values().iter().filter(|&&s| s > rank_tol).count();
    let mut ranks = Vec::with_capacity(k_max);
    let mut lower_ranks = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        // (P A)_{ij} = A_ij [i<k], (A P)_{ij} = A_ij [j<k]
        let commutator = DMatrix::from_fn(n, n, |i, j| {
            let sign = (i < k) as i32 - (j < k) as i32;
            sign as f64 * dense[(i, j)]
        });
        ranks.push(rank(commutator));
        lower_ranks.push(rank(dense.view((k, 0), (n - k, k)).into_owned()));
    }
    let degree_window = ranks.iter().copied().max().unwrap_or(0);
    Ok(DegreeReport { ranks, lower_ranks, degree_window, rank_tol })
}
