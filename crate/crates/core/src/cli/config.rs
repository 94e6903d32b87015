//! Run configuration: a line-oriented `key = value` file with a
//! `[potential]` section.
//!
//! ```text
//! # comments start with '#'
//! schedule = 256, 512, 1024, 2048
//! grid_min = -4.5
//! grid_max = 4.5
//! grid_points = 2001
//! tol = 1e-10
//!
//! [potential]
//! kind = CosineComposed          # CosineComposed | TrigPolynomial | Constant | Explicit
//! coeffs = 0, 2                  # ascending degree: v(x) = 2x
//! theta = 1                      # radians; also `pi/3`, `2*pi/5`, `0.5*pi`
//! ```
//!
//! Trigonometric terms are `amplitude : frequency : phase` triples separated
//! by `;` (frequency accepts the same forms as `theta`). Explicit potentials
//! take `samples = a, b, c` and `origin = <index of the first sample>`.
//!
//! Top-level keys: `n`, `schedule`, `m_schedule`, `grid_min`, `grid_max`,
//! `grid_points`, `tol`, `h`, `density_floor`, `gap_cap`, `K`,
//! `window_radius`, `offsets`, `shift`, `theta_min`, `theta_max`,
//! `theta_points`, `output`, `threads`. Overrides given as
//! `--set key=value` use `potential.<key>` for the potential section.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use crate::numeric::linspace;
use crate::potentials::{Angle, PotentialSpec, TrigTerm};
use crate::specmeasure::{DEFAULT_DENSITY_FLOOR, DEFAULT_GAP_CAP};

pub const THREADS_ENV: &str = "JACOBI_SPECTRA_THREADS";

const TOP_KEYS: &[&str] = &[
    "command",
    "n",
    "schedule",
    "m_schedule",
    "grid_min",
    "grid_max",
    "grid_points",
    "tol",
    "h",
    "density_floor",
    "gap_cap",
    "K",
    "window_radius",
    "offsets",
    "shift",
    "theta_min",
    "theta_max",
    "theta_points",
    "output",
    "threads",
];

const POTENTIAL_KEYS: &[&str] = &["kind", "coeffs", "theta", "terms", "value", "samples", "origin"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self { key: key.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error in `{}`: {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Eigs,
    Cdf,
    Spectrum,
    Gaps,
    Moments,
    Crosscheck,
    Butterfly,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eigs => "eigs",
            Command::Cdf => "cdf",
            Command::Spectrum => "spectrum",
            Command::Gaps => "gaps",
            Command::Moments => "moments",
            Command::Crosscheck => "crosscheck",
            Command::Butterfly => "butterfly",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            Command::Eigs,
            Command::Cdf,
            Command::Spectrum,
            Command::Gaps,
            Command::Moments,
            Command::Crosscheck,
            Command::Butterfly,
        ]
        .into_iter()
        .find(|c| c.name() == s)
    }
}

/// Key/value pairs as written, before interpretation. Keys in the
/// `[potential]` section are stored as `potential.<key>`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        let mut section = String::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                if name != "potential" {
                    return Err(ConfigError::new(format!("[{name}]"), format!("unknown section on line {}", lineno + 1)));
                }
                section = format!("{name}.");
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::new(format!("line {}", lineno + 1), "expected `key = value`"))?;
            raw.insert(&format!("{section}{}", key.trim()), value.trim())?;
        }
        Ok(raw)
    }

    /// Applies a `key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError::new(assignment, "override must look like key=value"))?;
        self.insert(key.trim(), value.trim())
    }

    fn insert(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let known = match key.strip_prefix("potential.") {
            Some(k) => POTENTIAL_KEYS.contains(&k),
            None => TOP_KEYS.contains(&key),
        };
        if !known {
            return Err(ConfigError::new(key, "unknown key"));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.points)
    }
}

/// A fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub potential: PotentialSpec,
    pub n: usize,
    pub schedule: Vec<usize>,
    pub m_schedule: Vec<usize>,
    pub grid: GridSpec,
    pub tol: f64,
    pub h: f64,
    pub density_floor: f64,
    pub gap_cap: usize,
    pub k: usize,
    pub window_radius: usize,
    pub offsets: Vec<i64>,
    pub shift: i64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub theta_points: usize,
    pub output: Option<PathBuf>,
    /// 0 selects the default pool size.
    pub threads: usize,
}

fn parse_f64(key: &str, s: &str) -> Result<f64, ConfigError> {
    let v: f64 = s.parse().map_err(|_| ConfigError::new(key, format!("`{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(ConfigError::new(key, "must be finite"));
    }
    Ok(v)
}

fn parse_int<T: std::str::FromStr>(key: &str, s: &str) -> Result<T, ConfigError> {
    s.parse().map_err(|_| ConfigError::new(key, format!("`{s}` is not a valid integer")))
}

fn split_list(s: &str) -> Vec<&str> {
    let s = s.trim().trim_start_matches('[').trim_end_matches(']');
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).collect()
}

fn parse_list<T>(key: &str, s: &str, item: impl Fn(&str, &str) -> Result<T, ConfigError>) -> Result<Vec<T>, ConfigError> {
    split_list(s).into_iter().map(|t| item(key, t)).collect()
}

/// Parses `1`, `0.25`, `pi`, `pi/3`, `2*pi/5`, `0.5*pi`.
pub fn parse_angle(key: &str, s: &str) -> Result<Angle, ConfigError> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    if compact.is_empty() {
        return Err(ConfigError::new(key, "empty angle"));
    }
    let mut parts = compact.split('/');
    let numerator = parts.next().unwrap();
    let mut num = 1.0;
    let mut pis = 0;
    for factor in numerator.split('*') {
        if factor == "pi" {
            pis += 1;
        } else {
            num *= parse_f64(key, factor)?;
        }
    }
    let mut den = 1.0;
    for d in parts {
        let d = parse_f64(key, d)?;
        if d == 0.0 {
            return Err(ConfigError::new(key, "division by zero"));
        }
        den *= d;
    }
    match pis {
        0 => Ok(Angle::Radians(num / den)),
        1 => Ok(Angle::PiFraction { num, den }),
        _ => Err(ConfigError::new(key, "at most one factor of pi is supported")),
    }
}

pub fn format_angle(a: &Angle) -> String {
    match a {
        Angle::Radians(r) => format!("{r:?}"),
        Angle::PiFraction { num, den } => format!("{num:?}*pi/{den:?}"),
    }
}

fn parse_terms(key: &str, s: &str) -> Result<Vec<TrigTerm>, ConfigError> {
    s.split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let fields: Vec<&str> = t.split(':').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(ConfigError::new(key, format!("term `{t}` must be amplitude:frequency:phase")));
            }
            Ok(TrigTerm {
                amplitude: parse_f64(key, fields[0])?,
                frequency: parse_angle(key, fields[1])?,
                phase: parse_f64(key, fields[2])?,
            })
        })
        .collect()
}

fn parse_potential(raw: &RawConfig) -> Result<PotentialSpec, ConfigError> {
    let req = |k: &str| {
        let key = format!("potential.{k}");
        raw.get(&key).map(|v| (key.clone(), v)).ok_or_else(|| ConfigError::new(key, "missing"))
    };
    let (kind_key, kind) = req("kind")?;
    let spec = match kind {
        "CosineComposed" => {
            let (ck, coeffs) = req("coeffs")?;
            let coeffs = parse_list(&ck, coeffs, parse_f64)?;
            let (tk, theta) = req("theta")?;
            let theta = parse_angle(&tk, theta)?;
            PotentialSpec::cosine_composed(coeffs, theta).map_err(|e| ConfigError::new(ck, e.to_string()))?
        }
        "TrigPolynomial" => {
            let (tk, terms) = req("terms")?;
            let terms = parse_terms(&tk, terms)?;
            if terms.is_empty() {
                return Err(ConfigError::new(tk, "needs at least one term"));
            }
            PotentialSpec::trig(terms).map_err(|e| ConfigError::new(tk, e.to_string()))?
        }
        "Constant" => {
            let (vk, value) = req("value")?;
            PotentialSpec::constant(parse_f64(&vk, value)?)
        }
        "Explicit" => {
            let (sk, samples) = req("samples")?;
            let samples = parse_list(&sk, samples, parse_f64)?;
            let origin = match raw.get("potential.origin") {
                Some(o) => parse_int("potential.origin", o)?,
                None => 1,
            };
            PotentialSpec::explicit(samples, origin).map_err(|e| ConfigError::new(sk, e.to_string()))?
        }
        other => return Err(ConfigError::new(kind_key, format!("unknown kind `{other}`"))),
    };
    Ok(spec)
}

/// The `[potential]` block for `spec`, one `key = value` per line.
pub fn potential_lines(spec: &PotentialSpec) -> Vec<String> {
    let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
    let mut out = vec![format!("kind = {}", spec.kind_name())];
    match spec {
        PotentialSpec::CosineComposed { v, theta } => {
            out.push(format!("coeffs = {}", join(v.coeffs())));
            out.push(format!("theta = {}", format_angle(theta)));
        }
        PotentialSpec::TrigPolynomial { terms } => {
            let t: Vec<String> = terms
                .iter()
                .map(|t| format!("{:?} : {} : {:?}", t.amplitude, format_angle(&t.frequency), t.phase))
                .collect();
            out.push(format!("terms = {}", t.join("; ")));
        }
        PotentialSpec::Constant { value } => out.push(format!("value = {value:?}")),
        PotentialSpec::Explicit { samples, origin } => {
            out.push(format!("samples = {}", join(samples)));
            out.push(format!("origin = {origin}"));
        }
    }
    out
}

impl RunConfig {
    /// Parses the file text, applies overrides and validates every field.
    /// `command` from the command line takes precedence over the file.
    pub fn from_text(text: &str, command: Option<Command>, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::parse(text)?;
        for o in overrides {
            raw.set(o)?;
        }
        Self::from_raw(&raw, command, std::env::var(THREADS_ENV).ok().as_deref())
    }

    pub fn from_raw(raw: &RawConfig, command: Option<Command>, threads_env: Option<&str>) -> Result<Self, ConfigError> {
        let command = match (command, raw.get("command")) {
            (Some(c), _) => c,
            (None, Some(s)) => Command::parse(s).ok_or_else(|| ConfigError::new("command", format!("unknown command `{s}`")))?,
            (None, None) => return Err(ConfigError::new("command", "missing")),
        };
        let potential = parse_potential(raw)?;

        let f = |key: &str, default: f64| raw.get(key).map_or(Ok(default), |v| parse_f64(key, v));
        let u = |key: &str, default: usize| raw.get(key).map_or(Ok(default), |v| parse_int::<usize>(key, v));
        let usizes = |key: &str, default: &[usize]| {
            raw.get(key).map_or(Ok(default.to_vec()), |v| parse_list(key, v, parse_int::<usize>))
        };

        let n = u("n", 1000)?;
        if n < 1 {
            return Err(ConfigError::new("n", "must be at least 1"));
        }
        let schedule = usizes("schedule", &[256, 512, 1024, 2048])?;
        check_schedule("schedule", &schedule)?;
        let m_schedule = usizes("m_schedule", &[128, 256, 512])?;
        check_schedule("m_schedule", &m_schedule)?;

        let reach = potential.bound() + 2.5;
        let grid = GridSpec { min: f("grid_min", -reach)?, max: f("grid_max", reach)?, points: u("grid_points", 2001)? };
        if grid.points < 1 {
            return Err(ConfigError::new("grid_points", "must be at least 1"));
        }
        if grid.points > 1 && !(grid.min < grid.max) {
            return Err(ConfigError::new("grid_max", "must exceed grid_min"));
        }

        let tol = f("tol", 1e-10)?;
        if tol <= 0.0 {
            return Err(ConfigError::new("tol", "must be positive"));
        }
        let h = f("h", 0.01)?;
        if h <= 0.0 {
            return Err(ConfigError::new("h", "must be positive"));
        }
        let density_floor = f("density_floor", DEFAULT_DENSITY_FLOOR)?;
        if density_floor <= 0.0 {
            return Err(ConfigError::new("density_floor", "must be positive"));
        }
        let gap_cap = u("gap_cap", DEFAULT_GAP_CAP)?;
        let k = u("K", 6)?;
        let window_radius = u("window_radius", 100_000)?;
        if window_radius <= k {
            return Err(ConfigError::new("window_radius", "must exceed K"));
        }
        let offsets = match raw.get("offsets") {
            Some(v) => {
                let o = parse_list("offsets", v, parse_int::<i64>)?;
                if o.is_empty() {
                    return Err(ConfigError::new("offsets", "must be nonempty"));
                }
                o
            }
            None => crate::potentials::default_offsets(window_radius),
        };
        let shift = raw.get("shift").map_or(Ok(0), |v| parse_int::<i64>("shift", v))?;

        let theta_min = f("theta_min", 0.0)?;
        let theta_max = f("theta_max", std::f64::consts::PI)?;
        let theta_points = u("theta_points", 64)?;
        if theta_points < 1 {
            return Err(ConfigError::new("theta_points", "must be at least 1"));
        }
        if theta_points > 1 && !(theta_min < theta_max) {
            return Err(ConfigError::new("theta_max", "must exceed theta_min"));
        }
        if command == Command::Butterfly && !matches!(potential, PotentialSpec::CosineComposed { .. }) {
            return Err(ConfigError::new("potential.kind", "butterfly sweeps theta and needs CosineComposed"));
        }

        let output = raw.get("output").filter(|s| !s.is_empty()).map(PathBuf::from);
        if command == Command::Butterfly && output.is_none() {
            return Err(ConfigError::new("output", "butterfly writes a directory and needs `output`"));
        }
        let threads = match (raw.get("threads"), threads_env) {
            (Some(v), _) => parse_int("threads", v)?,
            (None, Some(v)) if !v.trim().is_empty() => parse_int(THREADS_ENV, v.trim())?,
            _ => 0,
        };

        Ok(RunConfig {
            command,
            potential,
            n,
            schedule,
            m_schedule,
            grid,
            tol,
            h,
            density_floor,
            gap_cap,
            k,
            window_radius,
            offsets,
            shift,
            theta_min,
            theta_max,
            theta_points,
            output,
            threads,
        })
    }

    /// Canonical `key = value` lines describing everything that affects
    /// results. `output` and `threads` are left out.
    pub fn echo_lines(&self) -> Vec<String> {
        let ints = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(", ");
        let mut out = vec![
            format!("command = {}", self.command.name()),
            format!("n = {}", self.n),
            format!("schedule = {}", ints(&self.schedule)),
            format!("m_schedule = {}", ints(&self.m_schedule)),
            format!("grid_min = {:?}", self.grid.min),
            format!("grid_max = {:?}", self.grid.max),
            format!("grid_points = {}", self.grid.points),
            format!("tol = {:?}", self.tol),
            format!("h = {:?}", self.h),
            format!("density_floor = {:?}", self.density_floor),
            format!("gap_cap = {}", self.gap_cap),
            format!("K = {}", self.k),
            format!("window_radius = {}", self.window_radius),
            format!("offsets = {}", self.offsets.iter().map(i64::to_string).collect::<Vec<_>>().join(", ")),
            format!("shift = {}", self.shift),
            format!("theta_min = {:?}", self.theta_min),
            format!("theta_max = {:?}", self.theta_max),
            format!("theta_points = {}", self.theta_points),
            "[potential]".to_string(),
        ];
        out.extend(potential_lines(&self.potential));
        out
    }
}

fn check_schedule(key: &str, s: &[usize]) -> Result<(), ConfigError> {
    if s.is_empty() {
        return Err(ConfigError::new(key, "must be nonempty"));
    }
    if s[0] == 0 || !s.windows(2).all(|w| w[0] < w[1]) {
        return Err(ConfigError::new(key, "must be positive and strictly increasing"));
    }
    Ok(())
}
