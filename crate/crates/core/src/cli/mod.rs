//! The `jacobi-spectra` command pipelines.
//!
//! [`execute`] computes every output file in memory; [`run`] writes them and
//! maps failures to exit codes (0 ok, 1 I/O, 2 config, 3 certification).

pub mod config;
pub mod output;

use std::fmt;
use std::path::{Path, PathBuf};

pub use config::{Command, ConfigError, RunConfig};

use crate::error::Error;
use crate::potentials::{
    claimed_nonperiodic, von_neumann_mean, Angle, PotentialSpec, DEFAULT_MAX_PERIOD, DEFAULT_PERIOD_TOL,
};
use crate::specmeasure::{
    bilateral_crosscheck, classify_spectrum, estimate_distribution_shifted, gap_intervals, moment_match,
    ClassifyParams, SpectrumReport,
};
use crate::tridiag::{build_unilateral_shifted, eigenvalues};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Numerical(Error),
    Io(PathBuf, std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => EXIT_CONFIG,
            RunError::Numerical(_) => EXIT_NUMERICAL,
            RunError::Io(..) => EXIT_IO,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Numerical(e) => write!(f, "numerical certification failure: {e}"),
            RunError::Io(p, e) => write!(f, "cannot write {}: {e}", p.display()),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        if e.is_certification_failure() {
            return RunError::Numerical(e);
        }
        let key = match &e {
            Error::ExplicitOutOfRange { .. } => "potential.samples",
            Error::InvalidPotential(_) => "potential",
            _ => "config",
        };
        RunError::Config(ConfigError::new(key, e.to_string()))
    }
}

/// One file produced by a run. `path` is relative to the output location;
/// `None` means the primary output (stdout when no `output` is configured).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub path: Option<PathBuf>,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub files: Vec<OutputFile>,
    /// Human-readable summary for stderr.
    pub summary: Vec<String>,
}

fn provenance(config: &RunConfig) -> Result<Vec<String>, RunError> {
    let mut lines = vec![format!("jacobi-spectra {VERSION}")];
    lines.extend(config.echo_lines());
    if !matches!(config.potential, PotentialSpec::Explicit { .. }) {
        let flag = claimed_nonperiodic(&config.potential)?;
        lines.push(format!(
            "claimed_nonperiodic = {flag} (no period <= {DEFAULT_MAX_PERIOD} at tol {DEFAULT_PERIOD_TOL:e}; finite test only)"
        ));
    }
    Ok(lines)
}

/// Runs the configured command on a pool of `config.threads` workers.
/// Results do not depend on the thread count.
pub fn execute(config: &RunConfig) -> Result<RunOutput, RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| RunError::Config(ConfigError::new("threads", e.to_string())))?;
    pool.install(|| execute_inner(config))
}

fn single(contents: String, summary: Vec<String>) -> RunOutput {
    RunOutput { files: vec![OutputFile { path: None, contents }], summary }
}

fn execute_inner(config: &RunConfig) -> Result<RunOutput, RunError> {
    let header = provenance(config)?;
    let spec = &config.potential;
    let grid = config.grid.points();
    let params = || ClassifyParams::new(config.h, config.density_floor, config.gap_cap).map_err(RunError::from);
    match config.command {
        Command::Eigs => {
            let a = build_unilateral_shifted(spec, config.n, config.shift)?;
            let list = eigenvalues(&a, config.tol)?;
            let summary = vec![
                format!("n = {}, certified radius = {:e}", list.n(), list.certified_radius),
                format!("smallest = {}, largest = {}", list.values[0], list.values[list.n() - 1]),
            ];
            Ok(single(output::eigenvalues_csv(&header, &list, a.origin(), config.tol), summary))
        }
        Command::Cdf => {
            let est = estimate_distribution_shifted(spec, &config.schedule, &grid, config.tol, config.shift)?;
            let summary = est
                .schedule
                .windows(2)
                .zip(&est.cauchy_sup)
                .map(|(w, d)| format!("sup |F_{} - F_{}| = {d:e}", w[1], w[0]))
                .collect();
            Ok(single(output::cdf_csv(&header, &est), summary))
        }
        Command::Spectrum => {
            let rep = classify_spectrum(spec, &grid, &config.schedule, params()?)?;
            let summary = vec![tally_line(&rep)];
            Ok(single(output::spectrum_csv(&header, &rep), summary))
        }
        Command::Gaps => {
            let rep = classify_spectrum(spec, &grid, &config.schedule, params()?)?;
            let gaps = gap_intervals(&rep);
            let mut summary = vec![tally_line(&rep), format!("{} gap interval(s)", gaps.len())];
            summary.extend(gaps.iter().map(|g| format!("  ({}, {}]  max count {}", g.lo, g.hi, g.max_count)));
            Ok(single(output::gaps_csv(&header, &gaps), summary))
        }
        Command::Moments => {
            let flag_tol = 10.0 / (*config.schedule.last().unwrap() as f64).sqrt();
            let rep = moment_match(spec, &config.schedule, config.k, config.window_radius, config.tol, flag_tol)?;
            let mean = von_neumann_mean(spec, config.window_radius, &config.offsets)?;
            let mut header = header;
            header.push(format!(
                "diagonal_mean = {}, uniformity_defect = {}",
                output::fmt17(mean.value),
                output::fmt17(mean.uniformity_defect)
            ));
            header.push(format!("n = {}, flag_tol = {}", rep.n, output::fmt17(flag_tol)));
            let summary = rep
                .rows
                .iter()
                .map(|r| {
                    format!("k={} cesaro={} trace={} diff={:e}{}", r.k, r.cesaro, r.trace, r.abs_diff, if r.flagged { "  FLAGGED" } else { "" })
                })
                .collect();
            Ok(single(output::moments_csv(&header, &rep), summary))
        }
        Command::Crosscheck => {
            let rows = bilateral_crosscheck(spec, &config.m_schedule, &grid)?;
            let summary = rows.iter().map(|r| format!("m={} dim={} sup distance {:e}", r.m, r.dim, r.sup_distance)).collect();
            Ok(single(output::crosscheck_csv(&header, &rows), summary))
        }
        Command::Butterfly => butterfly(config, &header, &grid),
    }
}

fn tally_line(rep: &SpectrumReport) -> String {
    let (i, g, u) = rep.tally();
    format!("{i} in spectrum, {g} gap, {u} undecided (h = {}, schedule {:?})", rep.params.h, rep.schedule)
}

fn butterfly(config: &RunConfig, header: &[String], grid: &[f64]) -> Result<RunOutput, RunError> {
    let PotentialSpec::CosineComposed { v, .. } = &config.potential else {
        return Err(ConfigError::new("potential.kind", "butterfly needs CosineComposed").into());
    };
    let params = ClassifyParams::new(config.h, config.density_floor, config.gap_cap)?;
    let thetas = crate::numeric::linspace(config.theta_min, config.theta_max, config.theta_points);
    let mut files = Vec::with_capacity(thetas.len() + 1);
    let mut index = String::new();
    for l in header {
        index.push_str(&format!("# {l}\n"));
    }
    index.push_str("theta,file,in,gap,und\n");
    for (i, &theta) in thetas.iter().enumerate() {
        let spec = PotentialSpec::CosineComposed { v: v.clone(), theta: Angle::Radians(theta) };
        let rep = classify_spectrum(&spec, grid, &config.schedule, params)?;
        let name = format!("theta_{i:04}.csv");
        let mut h = header.to_vec();
        h.push(format!("theta = {theta:?}"));
        let (a, b, c) = rep.tally();
        index.push_str(&format!("{},{name},{a},{b},{c}\n", output::fmt17(theta)));
        files.push(OutputFile { path: Some(PathBuf::from(name)), contents: output::spectrum_csv(&h, &rep) });
    }
    files.push(OutputFile { path: Some(PathBuf::from("index.csv")), contents: index });
    let summary = vec![format!("{} theta values written", thetas.len())];
    Ok(RunOutput { files, summary })
}

/// Writes `out` to `config.output` (a file, or a directory for multi-file
/// commands), or to stdout when no output is configured.
pub fn write_outputs(out: &RunOutput, target: Option<&Path>) -> Result<(), RunError> {
    use std::io::Write;
    let multi = out.files.iter().any(|f| f.path.is_some());
    match target {
        None => {
            let mut stdout = std::io::stdout().lock();
            for f in &out.files {
                stdout.write_all(f.contents.as_bytes()).map_err(|e| RunError::Io(PathBuf::from("<stdout>"), e))?;
            }
        }
        Some(dir) if multi => {
            std::fs::create_dir_all(dir).map_err(|e| RunError::Io(dir.to_path_buf(), e))?;
            for f in &out.files {
                let p = dir.join(f.path.as_deref().unwrap_or(Path::new("output.csv")));
                std::fs::write(&p, &f.contents).map_err(|e| RunError::Io(p.clone(), e))?;
            }
        }
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| RunError::Io(parent.to_path_buf(), e))?;
            }
            let contents: String = out.files.iter().map(|f| f.contents.as_str()).collect();
            std::fs::write(path, contents).map_err(|e| RunError::Io(path.to_path_buf(), e))?;
        }
    }
    Ok(())
}

/// Executes and writes; returns the process exit code.
pub fn run(config: &RunConfig) -> i32 {
    let result = execute(config).and_then(|out| {
        write_outputs(&out, config.output.as_deref())?;
        Ok(out)
    });
    match result {
        Ok(out) => {
            for line in &out.summary {
                eprintln!("{line}");
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use config::RawConfig;

    fn config(text: &str, command: Command) -> RunConfig {
        RunConfig::from_raw(&RawConfig::parse(text).unwrap(), Some(command), None).unwrap()
    }

    #[test]
    fn eigs_free_matches_closed_form() {
        let c = config("n = 10\ntol = 1e-10\n[potential]\nkind = Constant\nvalue = 0\n", Command::Eigs);
        let out = execute(&c).unwrap();
        let text = &out.files[0].contents;
        assert!(text.starts_with(&format!("# jacobi-spectra {VERSION}\n")));
        assert!(text.contains("# n=10, origin=1, tol="));
        let vals = output::parse_values(text).unwrap();
        assert_eq!(vals.len(), 10);
        for (i, v) in vals.iter().enumerate() {
            let k = 10 - i;
            let exact = 2.0 * (k as f64 * std::f64::consts::PI / 11.0).cos();
            assert!((v - exact).abs() <= 1e-10);
        }
    }

    #[test]
    fn moments_free_rows() {
        let c = config(
            "schedule = 1024\nK = 4\nwindow_radius = 50\n[potential]\nkind = Constant\nvalue = 0\n",
            Command::Moments,
        );
        let out = execute(&c).unwrap();
        let body: Vec<&str> = out.files[0].contents.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body[0], "k,cesaro,trace,abs_diff");
        let row = |k: usize| body[k + 1].split(',').map(|s| s.parse::<f64>().unwrap()).collect::<Vec<_>>();
        assert_eq!(row(0), vec![0.0, 1.0, 1.0, 0.0]);
        assert_eq!(row(2)[2], 2.0);
        assert_eq!(row(4)[2], 6.0);
        for k in 0..=4 {
            assert!(row(k)[3] < 0.02, "k={k}: {:?}", row(k));
        }
    }

    #[test]
    fn certification_failure_maps_to_exit_three() {
        let c = config("n = 10\ntol = 1e-18\n[potential]\nkind = Constant\nvalue = 0\n", Command::Eigs);
        let err = execute(&c).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_NUMERICAL);
        assert!(err.to_string().contains("1e-18"));
    }

    #[test]
    fn explicit_range_maps_to_config_error() {
        let c = config("n = 10\n[potential]\nkind = Explicit\nsamples = 1, 2, 3\n", Command::Eigs);
        match execute(&c).unwrap_err() {
            RunError::Config(e) => assert_eq!(e.key, "potential.samples"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn butterfly_writes_index_and_per_theta_files() {
        let c = config(
            "output = unused\ntheta_points = 3\ntheta_min = 0.5\ntheta_max = 1.5\nschedule = 32, 64\ngrid_points = 41\nh = 0.05\n\
             [potential]\nkind = CosineComposed\ncoeffs = 0, 2\ntheta = 1\n",
            Command::Butterfly,
        );
        let out = execute(&c).unwrap();
        assert_eq!(out.files.len(), 4);
        let index = &out.files[3];
        assert_eq!(index.path.as_deref(), Some(Path::new("index.csv")));
        let rows: Vec<&str> = index.contents.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows.len(), 4);
        assert!(rows[2].contains("theta_0001.csv"));
        assert!(out.files[1].contents.contains("# theta = 1.0\n"));
    }
}
