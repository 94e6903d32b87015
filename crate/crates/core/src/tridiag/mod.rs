//! Finite tridiagonal compressions of `T e_n = e_{n-1} + d_n e_n + e_{n+1}`.
//!
//! Off-diagonal entries are the constant 1 and are not stored. Every
//! compression is therefore an unreduced symmetric Jacobi matrix with simple
//! eigenvalues.

mod bisect;
mod degree;

pub use bisect::{eigenvalues, pivot_floor, sturm_count, EigenvalueList};
pub use degree::{filtration_degree_window, BandedMatrix, DegreeReport};

use crate::error::{Error, Result};
use crate::potentials::{sample_sequence, PotentialSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    diag: Vec<f64>,
    origin: i64,
}

impl TridiagonalMatrix {
    /// `origin` is the bilateral index of `diag[0]`.
    pub fn new(diag: Vec<f64>, origin: i64) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidArgument("matrix dimension must be at least 1".into()));
        }
        if diag.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidArgument("non-finite diagonal entry".into()));
        }
        Ok(Self { diag, origin })
    }

    pub fn from_diag(diag: Vec<f64>) -> Result<Self> {
        Self::new(diag, 1)
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn origin(&self) -> i64 {
        self.origin
    }

    /// Gershgorin enclosure `[min(diag) - 2, max(diag) + 2]`.
    pub fn gershgorin(&self) -> (f64, f64) {
        let (lo, hi) = self
            .diag
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| (lo.min(d), hi.max(d)));
        (lo - 2.0, hi + 2.0)
    }

    /// The leading `(n-1)`-dimensional principal submatrix.
    pub fn leading_submatrix(&self) -> Option<Self> {
        (self.dim() > 1).then(|| Self { diag: self.diag[..self.dim() - 1].to_vec(), origin: self.origin })
    }
}

/// Unilateral compression with diagonal `d_1, …, d_n`.
pub fn build_unilateral(spec: &PotentialSpec, n: usize) -> Result<TridiagonalMatrix> {
    build_unilateral_shifted(spec, n, 0)
}

/// Unilateral compression over the window `d_{1+shift}, …, d_{n+shift}`.
pub fn build_unilateral_shifted(spec: &PotentialSpec, n: usize, shift: i64) -> Result<TridiagonalMatrix> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let lo = 1 + shift;
    let diag = sample_sequence(spec, lo, lo + n as i64 - 1)?;
    TridiagonalMatrix::new(diag, lo)
}

/// Bilateral compression with diagonal `d_{-m}, …, d_m` (dimension `2m+1`).
pub fn build_bilateral(spec: &PotentialSpec, m: usize) -> Result<TridiagonalMatrix> {
    let m = m as i64;
    let diag = sample_sequence(spec, -m, m)?;
    TridiagonalMatrix::new(diag, -m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::Angle;

    fn am(theta: Angle) -> PotentialSpec {
        PotentialSpec::cosine_composed(vec![0.0, 2.0], theta).unwrap()
    }

    #[test]
    fn unilateral_examples() {
        let t = build_unilateral(&PotentialSpec::constant(0.0), 3).unwrap();
        assert_eq!(t.diag(), &[0.0, 0.0, 0.0]);
        assert_eq!(t.origin(), 1);

        let t = build_unilateral(&am(Angle::pi_fraction(1.0, 2.0)), 4).unwrap();
        let expect = [0.0, -2.0, 0.0, 2.0];
        for (a, b) in t.diag().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15, "{:?}", t.diag());
        }

        let t = build_unilateral(&am(Angle::radians(1.0)), 2).unwrap();
        assert!((t.diag()[0] - 1.080_604_611_736_279_4).abs() < 1e-15);
        assert!((t.diag()[1] + 0.832_293_673_094_284_8).abs() < 1e-15);
    }

    #[test]
    fn bilateral_examples() {
        let t = build_bilateral(&PotentialSpec::constant(2.5), 1).unwrap();
        assert_eq!(t.diag(), &[2.5; 3]);
        assert_eq!(t.origin(), -1);

        let spec = PotentialSpec::explicit(vec![7.0, 8.0, 9.0], -1).unwrap();
        assert_eq!(build_bilateral(&spec, 1).unwrap().diag(), &[7.0, 8.0, 9.0]);

        let t = build_bilateral(&am(Angle::radians(1.0)), 1).unwrap();
        assert_eq!(t.diag()[1], 2.0);
        assert_eq!(t.diag()[0], t.diag()[2]);
        assert!((t.diag()[0] - 2.0 * 1f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn shifted_window_and_errors() {
        let spec = PotentialSpec::explicit((0..10).map(f64::from).collect(), 0).unwrap();
        let t = build_unilateral_shifted(&spec, 3, 4).unwrap();
        assert_eq!(t.diag(), &[5.0, 6.0, 7.0]);
        assert_eq!(t.origin(), 5);
        assert!(matches!(build_unilateral(&spec, 10), Err(Error::ExplicitOutOfRange { .. })));
        assert!(build_unilateral(&spec, 0).is_err());
        assert!(TridiagonalMatrix::from_diag(vec![]).is_err());
    }
}
