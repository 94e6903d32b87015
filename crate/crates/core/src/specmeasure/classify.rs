//! Spectrum and gap classification from interval counts `N_n((λ-h, λ+h])`.
//!
//! Inside the spectrum the counts grow linearly in `n`; in a gap they stay
//! uniformly bounded. Finite schedules give evidence, not proof, so points
//! where neither test passes cleanly are reported as undecided.

use rayon::prelude::*;

use super::{validate_grid, validate_schedule};
use crate::error::{Error, Result};
use crate::potentials::PotentialSpec;
use crate::tridiag::{build_unilateral, sturm_count};

pub const DEFAULT_DENSITY_FLOOR: f64 = 1e-3;
pub const DEFAULT_GAP_CAP: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyParams {
    /// Half-width of the probe interval `(λ-h, λ+h]`.
    pub h: f64,
    /// Minimum `N_n(I)/n` over the tail of the schedule for `InSpectrum`.
    pub density_floor: f64,
    /// Maximum `N_n(I)` over the whole schedule for `Gap`.
    pub gap_cap: usize,
}

impl ClassifyParams {
    pub fn new(h: f64, density_floor: f64, gap_cap: usize) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument("h must be positive".into()));
        }
        if !(density_floor > 0.0 && density_floor.is_finite()) {
            return Err(Error::InvalidArgument("density_floor must be positive".into()));
        }
        Ok(Self { h, density_floor, gap_cap })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Classification {
    /// Carries the smallest `N_n(I)/n` seen over the tail of the schedule.
    InSpectrum { density: f64 },
    /// Carries the largest `N_n(I)` seen over the schedule.
    Gap { max_count: usize },
    Undecided,
}

impl Classification {
    pub fn code(&self) -> &'static str {
        match self {
            Classification::InSpectrum { .. } => "IN",
            Classification::Gap { .. } => "GAP",
            Classification::Undecided => "UND",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub grid: Vec<f64>,
    pub classification: Vec<Classification>,
    pub params: ClassifyParams,
    pub schedule: Vec<usize>,
    /// `counts[j][i] = N_{schedule[j]}((grid[i]-h, grid[i]+h])`.
    pub counts: Vec<Vec<usize>>,
}

impl SpectrumReport {
    pub fn tally(&self) -> (usize, usize, usize) {
        self.classification.iter().fold((0, 0, 0), |(a, b, c), cl| match cl {
            Classification::InSpectrum { .. } => (a + 1, b, c),
            Classification::Gap { .. } => (a, b + 1, c),
            Classification::Undecided => (a, b, c + 1),
        })
    }
}

/// Classifies each grid point as in the spectrum, in a gap, or undecided.
///
/// `InSpectrum` needs `N_n(I)/n ≥ density_floor` for every `n` in the tail
/// half of the schedule; `Gap` needs `N_n(I) ≤ gap_cap` for every `n`. A
/// point meeting both tests is reported `Undecided`.
pub fn classify_spectrum(
    spec: &PotentialSpec,
    grid: &[f64],
    schedule: &[usize],
    params: ClassifyParams,
) -> Result<SpectrumReport> {
    validate_schedule(schedule, "schedule")?;
    validate_grid(grid)?;
    let h = params.h;
    let counts: Vec<Vec<usize>> = schedule
        .iter()
        .map(|&n| {
            let a = build_unilateral(spec, n)?;
            Ok(grid
                .par_iter()
                .map(|&x| sturm_count(&a, x + h).saturating_sub(sturm_count(&a, x - h)))
                .collect())
        })
        .collect::<Result<_>>()?;

    let tail_start = schedule.len() / 2;
    let classification = (0..grid.len())
        .map(|i| {
            let density = (tail_start..schedule.len())
                .map(|j| counts[j][i] as f64 / schedule[j] as f64)
                .fold(f64::INFINITY, f64::min);
            let max_count = counts.iter().map(|row| row[i]).max().unwrap_or(0);
            let growing = density >= params.density_floor;
            let bounded = max_count <= params.gap_cap;
            match (growing, bounded) {
                (true, false) => Classification::InSpectrum { density },
                (false, true) => Classification::Gap { max_count },
                _ => Classification::Undecided,
            }
        })
        .collect();

    Ok(SpectrumReport { grid: grid.to_vec(), classification, params, schedule: schedule.to_vec(), counts })
}

/// A maximal run of consecutive `Gap` grid points, widened by `h` on both
/// sides: the union of their probe intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapInterval {
    pub lo: f64,
    pub hi: f64,
    pub max_count: usize,
    pub points: usize,
}

pub fn gap_intervals(report: &SpectrumReport) -> Vec<GapInterval> {
    let h = report.params.h;
    let mut out: Vec<GapInterval> = Vec::new();
    let mut open: Option<GapInterval> = None;
    for (x, cl) in report.grid.iter().zip(&report.classification) {
        match (cl, open.as_mut()) {
            (Classification::Gap { max_count }, Some(g)) => {
                g.hi = x + h;
                g.max_count = g.max_count.max(*max_count);
                g.points += 1;
            }
            (Classification::Gap { max_count }, None) => {
                open = Some(GapInterval { lo: x - h, hi: x + h, max_count: *max_count, points: 1 });
            }
            (_, _) => out.extend(open.take()),
        }
    }
    out.extend(open);
    out
}
