//! Almost-periodic diagonal sequences and their von Neumann means.
//!
//! A [`PotentialSpec`] describes a bounded real bilateral sequence
//! `d = {d_n : n ∈ ℤ}`. The main family is `d_n = v(cos(nθ))` with `v` a
//! polynomial on `[-1, 1]`; finite trigonometric polynomials, constants and
//! explicit sample arrays are also supported.
//!
//! Phases `nθ` are reduced modulo 2π in double-double arithmetic so that
//! `cos(nθ)` stays accurate to about 1e-15 for `|n|` up to 1e7 and beyond.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, two_prod, two_sum};

/// Highest polynomial degree accepted for `v`.
pub const MAX_DEGREE: usize = 64;

/// Default search bound used by [`claimed_nonperiodic`].
pub const DEFAULT_MAX_PERIOD: usize = 10_000;
/// Default tolerance used by [`claimed_nonperiodic`].
pub const DEFAULT_PERIOD_TOL: f64 = 1e-9;

const PI_HI: f64 = std::f64::consts::PI;
const PI_LO: f64 = 1.2246467991473532e-16;

// 2π split into three doubles (Cody–Waite).
const TWO_PI_1: f64 = 6.283185307179586;
const TWO_PI_2: f64 = 2.4492935982947064e-16;
const TWO_PI_3: f64 = -5.989539619436679e-33;

// Sequences shorter than this are sampled serially.
const PAR_THRESHOLD: usize = 1 << 14;

/// An angle in radians, either a plain double or an exact rational multiple
/// `num/den · π` carried in double-double precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Radians(f64),
    PiFraction { num: f64, den: f64 },
}

impl Angle {
    pub fn radians(r: f64) -> Self {
        Angle::Radians(r)
    }

    pub fn pi_fraction(num: f64, den: f64) -> Self {
        Angle::PiFraction { num, den }
    }

    /// The angle as an unevaluated sum `hi + lo`.
    pub fn double_double(&self) -> (f64, f64) {
        match *self {
            Angle::Radians(r) => (r, 0.0),
            Angle::PiFraction { num, den } => {
                let (p, e) = two_prod(num, PI_HI);
                let (hi, lo) = two_sum(p, e + num * PI_LO);
                let q1 = hi / den;
                let rem = (-q1).mul_add(den, hi) + lo;
                let q2 = rem / den;
                two_sum(q1, q2)
            }
        }
    }

    pub fn value(&self) -> f64 {
        let (hi, lo) = self.double_double();
        hi + lo
    }

    fn is_finite(&self) -> bool {
        match *self {
            Angle::Radians(r) => r.is_finite(),
            Angle::PiFraction { num, den } => num.is_finite() && den.is_finite() && den != 0.0,
        }
    }
}

/// Reduces `hi + lo` modulo 2π into roughly `[-π, π]`, returned as a
/// double-double.
fn reduce_two_pi(hi: f64, lo: f64) -> (f64, f64) {
    let k = (hi / TWO_PI_1).round();
    if k == 0.0 {
        return two_sum(hi, lo);
    }
    let (s, s_err) = two_prod(k, TWO_PI_1);
    // Sterbenz: hi and s agree to within a factor of two once k != 0.
    let head = hi - s;
    let tail = lo - s_err - k * TWO_PI_2 - k * TWO_PI_3;
    two_sum(head, tail)
}

/// `cos(n·θ + phase)` with the phase reduced in extended precision.
pub fn cos_of_multiple(n: i64, theta: &Angle, phase: f64) -> f64 {
    let (t_hi, t_lo) = theta.double_double();
    let nf = n as f64;
    let (p, e) = two_prod(nf, t_hi);
    let (hi, lo) = two_sum(p, phase);
    let (r_hi, r_lo) = reduce_two_pi(hi, lo + e + nf * t_lo);
    r_hi.cos() - r_hi.sin() * r_lo
}

/// A real polynomial in ascending-degree coefficient order.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidPotential("polynomial needs at least one coefficient".into()));
        }
        if coeffs.len() > MAX_DEGREE + 1 {
            return Err(Error::InvalidPotential(format!(
                "polynomial degree {} exceeds {MAX_DEGREE}",
                coeffs.len() - 1
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPotential("non-finite polynomial coefficient".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc.mul_add(x, c))
    }

    /// Sum of absolute coefficients, an upper bound for `|v|` on `[-1, 1]`.
    pub fn sup_bound(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs[1..].iter().all(|&c| c == 0.0)
    }
}

/// One term `amplitude · cos(n·frequency + phase)`, i.e. the real part of a
/// rotated character.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigTerm {
    pub amplitude: f64,
    pub frequency: Angle,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    /// `d_n = v(cos(nθ))`.
    CosineComposed { v: Polynomial, theta: Angle },
    /// `d_n = Σ a · cos(nφ + ψ)`.
    TrigPolynomial { terms: Vec<TrigTerm> },
    Constant { value: f64 },
    /// Finite table with `samples[0] = d_origin`. Test fixture only.
    Explicit { samples: Vec<f64>, origin: i64 },
}

impl PotentialSpec {
    pub fn constant(value: f64) -> Self {
        PotentialSpec::Constant { value }
    }

    pub fn cosine_composed(coeffs: Vec<f64>, theta: Angle) -> Result<Self> {
        let spec = PotentialSpec::CosineComposed { v: Polynomial::new(coeffs)?, theta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn explicit(samples: Vec<f64>, origin: i64) -> Result<Self> {
        let spec = PotentialSpec::Explicit { samples, origin };
        spec.validate()?;
        Ok(spec)
    }

    pub fn trig(terms: Vec<TrigTerm>) -> Result<Self> {
        let spec = PotentialSpec::TrigPolynomial { terms };
        spec.validate()?;
        Ok(spec)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            PotentialSpec::CosineComposed { .. } => "CosineComposed",
            PotentialSpec::TrigPolynomial { .. } => "TrigPolynomial",
            PotentialSpec::Constant { .. } => "Constant",
            PotentialSpec::Explicit { .. } => "Explicit",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialSpec::CosineComposed { v, theta } => {
                Polynomial::new(v.coeffs.clone())?;
                if !theta.is_finite() {
                    return Err(Error::InvalidPotential("theta must be finite".into()));
                }
            }
            PotentialSpec::TrigPolynomial { terms } => {
                for t in terms {
                    if !(t.amplitude.is_finite() && t.phase.is_finite() && t.frequency.is_finite()) {
                        return Err(Error::InvalidPotential("non-finite trigonometric term".into()));
                    }
                }
            }
            PotentialSpec::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::InvalidPotential("constant must be finite".into()));
                }
            }
            PotentialSpec::Explicit { samples, .. } => {
                if samples.is_empty() {
                    return Err(Error::InvalidPotential("explicit potential has no samples".into()));
                }
                if samples.iter().any(|s| !s.is_finite()) {
                    return Err(Error::InvalidPotential("non-finite explicit sample".into()));
                }
            }
        }
        Ok(())
    }

    /// Computable bound `B` with `|d_n| ≤ B` for every `n`.
    pub fn bound(&self) -> f64 {
        match self {
            PotentialSpec::CosineComposed { v, .. } => v.sup_bound(),
            PotentialSpec::TrigPolynomial { terms } => terms.iter().map(|t| t.amplitude.abs()).sum(),
            PotentialSpec::Constant { value } => value.abs(),
            PotentialSpec::Explicit { samples, .. } => {
                samples.iter().fold(0.0f64, |m, s| m.max(s.abs()))
            }
        }
    }

    /// Index range stored by an `Explicit` spec; `None` for generated kinds.
    pub fn available_range(&self) -> Option<(i64, i64)> {
        match self {
            PotentialSpec::Explicit { samples, origin } => {
                Some((*origin, *origin + samples.len() as i64 - 1))
            }
            _ => None,
        }
    }

    /// `d_n` for a single index.
    pub fn value_at(&self, n: i64) -> Result<f64> {
        match self {
            PotentialSpec::Explicit { samples, origin } => {
                let idx = n - origin;
                if idx < 0 || idx as usize >= samples.len() {
                    let (available_lo, available_hi) = self.available_range().unwrap();
                    return Err(Error::ExplicitOutOfRange { lo: n, hi: n, available_lo, available_hi });
                }
                Ok(samples[idx as usize])
            }
            _ => Ok(self.generate(n)),
        }
    }

    fn generate(&self, n: i64) -> f64 {
        match self {
            PotentialSpec::CosineComposed { v, theta } => v.eval(cos_of_multiple(n, theta, 0.0)),
            PotentialSpec::TrigPolynomial { terms } => terms
                .iter()
                .map(|t| t.amplitude * cos_of_multiple(n, &t.frequency, t.phase))
                .sum(),
            PotentialSpec::Constant { value } => *value,
            PotentialSpec::Explicit { .. } => unreachable!("explicit samples are looked up"),
        }
    }
}

/// `[d_lo, …, d_hi]`.
pub fn sample_sequence(spec: &PotentialSpec, lo: i64, hi: i64) -> Result<Vec<f64>> {
    if lo > hi {
        return Err(Error::InvalidRange { lo, hi });
    }
    if let Some((available_lo, available_hi)) = spec.available_range() {
        if lo < available_lo || hi > available_hi {
            return Err(Error::ExplicitOutOfRange { lo, hi, available_lo, available_hi });
        }
        if let PotentialSpec::Explicit { samples, origin } = spec {
            return Ok(samples[(lo - origin) as usize..=(hi - origin) as usize].to_vec());
        }
    }
    let len = (hi - lo + 1) as usize;
    let out = if len >= PAR_THRESHOLD {
        (lo..=hi).into_par_iter().map(|n| spec.generate(n)).collect()
    } else {
        (lo..=hi).map(|n| spec.generate(n)).collect()
    };
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub value: f64,
    pub window_radius: usize,
    /// Largest deviation of a translated window average from `value`.
    pub uniformity_defect: f64,
}

/// Offsets `{0, ±n, ±2n, ±5n, ±10n}` probed by default for window radius `n`.
pub fn default_offsets(window_radius: usize) -> Vec<i64> {
    let n = window_radius as i64;
    let mut out = vec![0];
    for m in [1, 2, 5, 10] {
        out.push(-m * n);
        out.push(m * n);
    }
    out
}

/// Symmetric Cesàro average over `[-n, n]`, together with the spread of the
/// same average over the translated windows `[k-n, k+n]`.
pub fn von_neumann_mean(spec: &PotentialSpec, window_radius: usize, offsets: &[i64]) -> Result<MeanEstimate> {
    if window_radius < 1 {
        return Err(Error::InvalidArgument("window_radius must be at least 1".into()));
    }
    if offsets.is_empty() {
        return Err(Error::InvalidArgument("offsets must be nonempty".into()));
    }
    let n = window_radius as i64;
    let width = (2 * n + 1) as f64;
    let window_mean = |k: i64| -> Result<f64> {
        let samples = sample_sequence(spec, k - n, k + n)?;
        Ok(compensated_sum(samples) / width)
    };
    let value = window_mean(0)?;
    let mut defect = 0.0f64;
    for &k in offsets {
        let m = if k == 0 { value } else { window_mean(k)? };
        defect = defect.max((m - value).abs());
    }
    Ok(MeanEstimate { value, window_radius, uniformity_defect: defect })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Periodicity {
    Periodic(usize),
    NoPeriodUpTo(usize),
}

/// Finite periodicity test: the least `p ≤ max_period` with
/// `|d_{n+p} - d_n| ≤ tol` on the whole test window.
///
/// The window is `[-W, W]` with `W = max(max_period, 256)`; for explicit
/// samples it is the stored range, and only pairs inside it are compared.
pub fn periodicity_check(spec: &PotentialSpec, max_period: usize, tol: f64) -> Result<Periodicity> {
    if max_period < 1 {
        return Err(Error::InvalidArgument("max_period must be at least 1".into()));
    }
    let (lo, hi, window_end) = match spec.available_range() {
        Some((a, b)) => (a, b, b),
        None => {
            let w = max_period.max(256) as i64;
            (-w, w + max_period as i64, w)
        }
    };
    let values = sample_sequence(spec, lo, hi)?;
    let last = (window_end - lo) as usize;
    for p in 1..=max_period {
        if p > last {
            break;
        }
        let periodic = (0..=last - p).all(|i| (values[i + p] - values[i]).abs() <= tol);
        if periodic {
            return Ok(Periodicity::Periodic(p));
        }
    }
    Ok(Periodicity::NoPeriodUpTo(max_period))
}

/// Heuristic stand-in for "θ/π is irrational and v is non-constant": no
/// period up to [`DEFAULT_MAX_PERIOD`] at tolerance [`DEFAULT_PERIOD_TOL`].
/// Finite evidence only.
pub fn claimed_nonperiodic(spec: &PotentialSpec) -> Result<bool> {
    Ok(matches!(
        periodicity_check(spec, DEFAULT_MAX_PERIOD, DEFAULT_PERIOD_TOL)?,
        Periodicity::NoPeriodUpTo(_)
    ))
}
