//! Empirical spectral measures `n⁻¹ N_n` of the compressions `T_n` and the
//! estimates of the limiting distribution `μ_T` built from them.

mod classify;
mod moments;

pub use classify::{
    classify_spectrum, gap_intervals, ClassifyParams, Classification, GapInterval, SpectrumReport, DEFAULT_DENSITY_FLOOR,
    DEFAULT_GAP_CAP,
};
pub use moments::{cesaro_moments, moment_match, trace_moments, MomentReport, MomentRow, TraceMoments};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;
use crate::potentials::{Polynomial, PotentialSpec};
use crate::tridiag::{
    build_bilateral, build_unilateral_shifted, eigenvalues, sturm_count, EigenvalueList,
    TridiagonalMatrix,
};

/// The probability measure `n⁻¹ Σ δ_{λ_i}` of one compression.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    values: EigenvalueList,
}

impl EmpiricalMeasure {
    pub fn new(values: EigenvalueList) -> Self {
        Self { values }
    }

    pub fn from_matrix(a: &TridiagonalMatrix, tol: f64) -> Result<Self> {
        Ok(Self::new(eigenvalues(a, tol)?))
    }

    pub fn n(&self) -> usize {
        self.values.n()
    }

    pub fn eigenvalues(&self) -> &EigenvalueList {
        &self.values
    }

    /// `N_n((-∞, x]) / n`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.values.count_le(x) as f64 / self.n() as f64
    }

    /// `N_n((a, b])`. Both endpoints must be resolved.
    pub fn counting(&self, a: f64, b: f64) -> Result<usize> {
        if !(a < b) {
            return Err(Error::InvalidArgument(format!("empty interval ({a}, {b}]")));
        }
        for x in [a, b] {
            if !self.values.is_resolved(x) {
                return Err(Error::UnresolvedEndpoint { value: x, radius: self.values.certified_radius });
            }
        }
        Ok(self.values.count_le(b) - self.values.count_le(a))
    }

    /// `n⁻¹ Σ f(λ_i)`.
    pub fn cesaro_functional(&self, f: &PiecewisePolynomial) -> f64 {
        self.cesaro_by(|x| f.eval(x))
    }

    pub fn cesaro_by(&self, f: impl Fn(f64) -> f64) -> f64 {
        compensated_sum(self.values.values.iter().map(|&x| f(x))) / self.n() as f64
    }
}

/// A function given by polynomial pieces on `(-∞, b_1], (b_1, b_2], …, (b_m, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolynomial {
    breakpoints: Vec<f64>,
    pieces: Vec<Polynomial>,
}

impl PiecewisePolynomial {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Polynomial>) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidArgument("need one more piece than breakpoints".into()));
        }
        if !breakpoints.windows(2).all(|w| w[0] < w[1]) || breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidArgument("breakpoints must be finite and strictly increasing".into()));
        }
        Ok(Self { breakpoints, pieces })
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        Self::new(Vec::new(), vec![Polynomial::new(coeffs)?])
    }

    pub fn constant(c: f64) -> Self {
        Self::polynomial(vec![c]).expect("finite constant")
    }

    pub fn monomial(k: usize) -> Result<Self> {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        Self::polynomial(coeffs)
    }

    /// Indicator of `(a, b]`.
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        let zero = Polynomial::new(vec![0.0])?;
        Self::new(vec![a, b], vec![zero.clone(), Polynomial::new(vec![1.0])?, zero])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let piece = self.breakpoints.partition_point(|&b| b < x);
        self.pieces[piece].eval(x)
    }
}

/// `sup_i |a_i - b_i|` over a shared grid.
pub fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `N_n((-∞, x]) / n` on each grid point, via Sturm counts.
pub fn cdf_on_grid(a: &TridiagonalMatrix, grid: &[f64]) -> Vec<f64> {
    let n = a.dim() as f64;
    grid.par_iter().map(|&x| sturm_count(a, x) as f64 / n).collect()
}

fn validate_schedule(schedule: &[usize], key: &str) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::InvalidArgument(format!("{key} must be nonempty")));
    }
    if schedule[0] == 0 || !schedule.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument(format!("{key} must be positive and strictly increasing")));
    }
    Ok(())
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.iter().any(|x| !x.is_finite()) || !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument("grid must be nonempty, finite and strictly increasing".into()));
    }
    Ok(())
}

/// Per-`n` CDFs on a shared grid plus Cauchy diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDistributionEstimate {
    pub schedule: Vec<usize>,
    pub grid: Vec<f64>,
    /// `cdfs[j][i]` = CDF of `T_{schedule[j]}` at `grid[i]`.
    pub cdfs: Vec<Vec<f64>>,
    /// CDF at the largest `n`.
    pub limit_cdf: Vec<f64>,
    /// `|CDF_{n_J} - CDF_{n_{J-1}}|` per grid point; zeros for a single `n`.
    pub convergence_profile: Vec<f64>,
    /// Sup-norm distance between successive rows, `J - 1` entries.
    pub cauchy_sup: Vec<f64>,
    pub tol: f64,
    /// Unilateral window shift: rows use `d_{1+shift}, …, d_{n+shift}`.
    pub shift: i64,
}

/// Estimates `μ_T` from the unilateral compressions `T_n`, `n` in `schedule`.
///
/// Every CDF is evaluated directly by Sturm counts; the grid must cover the
/// Gershgorin interval of every compression.
pub fn estimate_distribution(
    spec: &PotentialSpec,
    schedule: &[usize],
    grid: &[f64],
    tol: f64,
) -> Result<SpectralDistributionEstimate> {
    estimate_distribution_shifted(spec, schedule, grid, tol, 0)
}

pub fn estimate_distribution_shifted(
    spec: &PotentialSpec,
    schedule: &[usize],
    grid: &[f64],
    tol: f64,
    shift: i64,
) -> Result<SpectralDistributionEstimate> {
    validate_schedule(schedule, "schedule")?;
    validate_grid(grid)?;
    let mut cdfs = Vec::with_capacity(schedule.len());
    for &n in schedule {
        let a = build_unilateral_shifted(spec, n, shift)?;
        let (g_lo, g_hi) = a.gershgorin();
        let floor = 16.0 * f64::EPSILON * (g_hi - g_lo);
        if !(tol >= floor) {
            return Err(Error::TolTooSmall { tol, floor });
        }
        if grid[0] > g_lo || grid[grid.len() - 1] < g_hi {
            return Err(Error::InvalidArgument(format!(
                "grid [{}, {}] does not cover the Gershgorin interval [{g_lo}, {g_hi}] at n={n}",
                grid[0],
                grid[grid.len() - 1]
            )));
        }
        cdfs.push(cdf_on_grid(&a, grid));
    }
    let cauchy_sup: Vec<f64> = cdfs.windows(2).map(|w| sup_distance(&w[0], &w[1])).collect();
    let limit_cdf = cdfs.last().unwrap().clone();
    let convergence_profile = match cdfs.len() {
        1 => vec![0.0; grid.len()],
        j => cdfs[j - 1].iter().zip(&cdfs[j - 2]).map(|(a, b)| (a - b).abs()).collect(),
    };
    Ok(SpectralDistributionEstimate {
        schedule: schedule.to_vec(),
        grid: grid.to_vec(),
        cdfs,
        limit_cdf,
        convergence_profile,
        cauchy_sup,
        tol,
        shift,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrosscheckRow {
    pub m: usize,
    pub dim: usize,
    /// Sup-norm distance between the bilateral `(2m+1)` CDF and the unilateral
    /// CDF of the same dimension.
    pub sup_distance: f64,
}

/// Compares the bilateral compression over `[-m, m]` with the unilateral
/// compression `T_{2m+1}` for each `m`.
pub fn bilateral_crosscheck(spec: &PotentialSpec, m_schedule: &[usize], grid: &[f64]) -> Result<Vec<CrosscheckRow>> {
    if m_schedule.is_empty() {
        return Err(Error::InvalidArgument("m_schedule must be nonempty".into()));
    }
    validate_grid(grid)?;
    m_schedule
        .iter()
        .map(|&m| {
            let bilateral = build_bilateral(spec, m)?;
            let dim = bilateral.dim();
            let unilateral = build_unilateral_shifted(spec, dim, 0)?;
            let d = sup_distance(&cdf_on_grid(&bilateral, grid), &cdf_on_grid(&unilateral, grid));
            Ok(CrosscheckRow { m, dim, sup_distance: d })
        })
        .collect()
}

/// Sup-norm distance, at dimension `n`, between the CDF of the window
/// `d_{1+s}..d_{n+s}` and the unshifted one, for each shift `s`.
pub fn shift_crosscheck(spec: &PotentialSpec, n: usize, shifts: &[i64], grid: &[f64]) -> Result<Vec<(i64, f64)>> {
    validate_grid(grid)?;
    let base = cdf_on_grid(&build_unilateral_shifted(spec, n, 0)?, grid);
    shifts
        .iter()
        .map(|&s| {
            let row = cdf_on_grid(&build_unilateral_shifted(spec, n, s)?, grid);
            Ok((s, sup_distance(&base, &row)))
        })
        .collect()
}

/// `N_n((a, b])` straight from Sturm counts, without an eigenvalue list.
pub fn sturm_interval_count(a: &TridiagonalMatrix, lo: f64, hi: f64) -> usize {
    sturm_count(a, hi).saturating_sub(sturm_count(a, lo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::linspace;
    use crate::tridiag::build_unilateral;
    use std::f64::consts::PI;

    fn free(n: usize) -> EmpiricalMeasure {
        EmpiricalMeasure::from_matrix(&TridiagonalMatrix::from_diag(vec![0.0; n]).unwrap(), 1e-12).unwrap()
    }

    #[test]
    fn cesaro_examples() {
        let one = PiecewisePolynomial::constant(1.0);
        assert_eq!(free(7).cesaro_functional(&one), 1.0);
        let x = PiecewisePolynomial::monomial(1).unwrap();
        assert!(free(2).cesaro_functional(&x).abs() < 1e-15);

        let x2 = PiecewisePolynomial::monomial(2).unwrap();
        let oracle: f64 = (1..=10).map(|k| (2.0 * (k as f64 * PI / 11.0).cos()).powi(2)).sum::<f64>() / 10.0;
        // Σ_{k=1}^{n} 4cos²(kπ/(n+1)) = 2(n-1), so the mean is 1.8 at n = 10.
        assert!((oracle - 1.8).abs() < 1e-14);
        assert!((free(10).cesaro_functional(&x2) - oracle).abs() < 1e-11);
    }

    #[test]
    fn counting_examples() {
        let e2 = free(2);
        assert_eq!(e2.counting(-2.0, 0.0).unwrap(), 1);
        assert_eq!(e2.counting(5.0, 6.0).unwrap(), 0);
        assert_eq!(e2.counting(-9.0, -3.0).unwrap(), 0);
        assert_eq!(free(10).counting(0.0, 2.0).unwrap(), 5);
        assert!(matches!(e2.counting(-2.0, 1.0), Err(Error::UnresolvedEndpoint { .. })));
        assert!(e2.counting(1.0, 1.0).is_err());
    }

    #[test]
    fn indicator_matches_counting() {
        let e = free(10);
        let f = PiecewisePolynomial::indicator(0.0, 2.0).unwrap();
        assert!((e.cesaro_functional(&f) - 0.5).abs() < 1e-15);
        assert_eq!(f.eval(0.0), 0.0);
        assert_eq!(f.eval(2.0), 1.0);
    }

    #[test]
    fn single_n_schedule_is_degenerate() {
        let grid = linspace(-2.5, 2.5, 101);
        let est = estimate_distribution(&PotentialSpec::constant(0.0), &[50], &grid, 1e-10).unwrap();
        assert_eq!(est.limit_cdf, est.cdfs[0]);
        assert!(est.convergence_profile.iter().all(|&d| d == 0.0));
        assert!(est.cauchy_sup.is_empty());
    }

    #[test]
    fn arcsine_convergence_example() {
        let grid = linspace(-2.5, 2.5, 1001);
        let est = estimate_distribution(&PotentialSpec::constant(0.0), &[10, 100, 1000], &grid, 1e-10).unwrap();
        let arcsine = |x: f64| if x <= -2.0 { 0.0 } else if x >= 2.0 { 1.0 } else { (-x / 2.0).acos() / PI };
        let dev: Vec<f64> = est
            .cdfs
            .iter()
            .map(|row| grid.iter().zip(row).map(|(&x, &f)| (f - arcsine(x)).abs()).fold(0.0, f64::max))
            .collect();
        assert!(dev[2] < 2e-3, "{dev:?}");
        assert!(dev[0] > dev[1] && dev[1] > dev[2], "{dev:?}");
        for row in &est.cdfs {
            assert!(row.windows(2).all(|w| w[0] <= w[1]));
            assert_eq!(row[0], 0.0);
            assert_eq!(*row.last().unwrap(), 1.0);
        }
    }

    #[test]
    fn cdf_matches_eigenvalue_count() {
        let spec = PotentialSpec::cosine_composed(vec![0.0, 2.0], crate::potentials::Angle::radians(1.0)).unwrap();
        let a = build_unilateral(&spec, 300).unwrap();
        let e = EmpiricalMeasure::from_matrix(&a, 1e-12).unwrap();
        let grid = linspace(-4.1, 4.1, 333);
        for (x, f) in grid.iter().zip(cdf_on_grid(&a, &grid)) {
            if e.eigenvalues().is_resolved(*x) {
                assert_eq!(f, e.cdf(*x));
            }
        }
    }

    #[test]
    fn schedule_and_grid_validation() {
        let spec = PotentialSpec::constant(0.0);
        let grid = linspace(-3.0, 3.0, 11);
        assert!(estimate_distribution(&spec, &[], &grid, 1e-10).is_err());
        assert!(estimate_distribution(&spec, &[10, 10], &grid, 1e-10).is_err());
        assert!(estimate_distribution(&spec, &[10], &[1.0, 0.0], 1e-10).is_err());
        assert!(estimate_distribution(&spec, &[10], &linspace(-1.0, 1.0, 5), 1e-10).is_err());
        assert!(matches!(estimate_distribution(&spec, &[10], &grid, 1e-17), Err(Error::TolTooSmall { .. })));
    }

    #[test]
    fn constant_crosscheck_is_exact() {
        let grid = linspace(-3.5, 3.5, 301);
        let rows = bilateral_crosscheck(&PotentialSpec::constant(1.5), &[1, 8, 32], &grid).unwrap();
        assert!(rows.iter().all(|r| r.sup_distance == 0.0 && r.dim == 2 * r.m + 1));
    }

    #[test]
    fn symmetric_explicit_crosscheck_is_small() {
        let m = 200usize;
        let samples: Vec<f64> = (-(m as i64)..=(2 * m as i64 + 1))
            .map(|k| 1.5 * ((k as f64) * 0.7).cos() * (-(k as f64).abs() / 400.0).exp())
            .collect();
        let spec = PotentialSpec::explicit(samples, -(m as i64)).unwrap();
        let grid = linspace(-4.0, 4.0, 801);
        let rows = bilateral_crosscheck(&spec, &[m], &grid).unwrap();
        assert!(rows[0].sup_distance > 0.0 && rows[0].sup_distance < 0.2, "{rows:?}");
    }
}
