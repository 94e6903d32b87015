//! CSV writers. Every real is printed with 17 significant digits, lines end
//! in LF, and comment lines start with `# `.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::specmeasure::{
    Classification, CrosscheckRow, GapInterval, MomentReport, SpectralDistributionEstimate, SpectrumReport,
};
use crate::tridiag::{EigenvalueList, TridiagonalMatrix};

/// 17 significant digits in scientific notation; round-trips every double.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn comment_block(out: &mut String, lines: &[String]) {
    for l in lines {
        let _ = writeln!(out, "# {l}");
    }
}

/// One diagonal entry per line under `# n=…, origin=…, tol=…`.
pub fn matrix_csv(header: &[String], a: &TridiagonalMatrix) -> String {
    let mut out = String::new();
    comment_block(&mut out, header);
    let _ = writeln!(out, "# n={}, origin={}, tol=none", a.dim(), a.origin());
    for d in a.diag() {
        let _ = writeln!(out, "{}", fmt17(*d));
    }
    out
}

/// One eigenvalue per line under `# n=…, origin=…, tol=…`.
pub fn eigenvalues_csv(header: &[String], list: &EigenvalueList, origin: i64, tol: f64) -> String {
    let mut out = String::new();
    comment_block(&mut out, header);
    let _ = writeln!(out, "# n={}, origin={}, tol={}", list.n(), origin, fmt17(tol));
    let _ = writeln!(out, "# certified_radius={}, unresolved={}", fmt17(list.certified_radius), list.unresolved);
    for v in &list.values {
        let _ = writeln!(out, "{}", fmt17(*v));
    }
    out
}

/// Parses the body of a one-value-per-line CSV, skipping comments.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad value line `{l}`"))))
        .collect()
}

pub fn cdf_csv(header: &[String], est: &SpectralDistributionEstimate) -> String {
    let mut out = String::new();
    comment_block(&mut out, header);
    let cauchy: Vec<String> = est.cauchy_sup.iter().map(|d| fmt17(*d)).collect();
    let _ = writeln!(out, "# cauchy_sup={}", cauchy.join(" "));
    out.push('x');
    for n in &est.schedule {
        let _ = write!(out, ",n={n}");
    }
    out.push('\n');
    for (i, x) in est.grid.iter().enumerate() {
        out.push_str(&fmt17(*x));
        for row in &est.cdfs {
            out.push(',');
            out.push_str(&fmt17(row[i]));
        }
        out.push('\n');
    }
    out
}

pub fn spectrum_csv(header: &[String], rep: &SpectrumReport) -> String {
    let mut out = String::new();
    comment_block(&mut out, header);
    out.push_str("x,class,evidence,h,floor,cap\n");
    let p = &rep.params;
    for (x, cl) in rep.grid.iter().zip(&rep.classification) {
        let evidence = match cl {
            Classification::InSpectrum { density } => fmt17(*density),
            Classification::Gap { max_count } => max_count.to_string(),
            Classification::Undecided => String::new(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt17(*x),
            cl.code(),
            evidence,
            fmt17(p.h),
            fmt17(p.density_floor),
            p.gap_cap
        );
    }
    out
}

pub fn gaps_csv(header: &[String], gaps: &[GapInterval]) -> String {
    let mut out = String::new();
    comment_block(&mut out, header);
    out.push_str("lo,hi,max_count,points\n");
    for g in gaps {
        let _ = writeln!(out, "{},{},{},{}", fmt17(g.lo), fmt17(g.hi), g.max_count, g.points);
    }
    out
}

pub fn moments_csv(header: &[String], rep: &MomentReport) -> String {
    let mut out = String::new();
    comment_block(&mut out, header);
    out.push_str("k,cesaro,trace,abs_diff\n");
    for r in &rep.rows {
        let _ = writeln!(out, "{},{},{},{}", r.k, fmt17(r.cesaro), fmt17(r.trace), fmt17(r.abs_diff));
    }
    out
}

pub fn crosscheck_csv(header: &[String], rows: &[CrosscheckRow]) -> String {
    let mut out = String::new();
    comment_block(&mut out, header);
    out.push_str("m,dim,sup_distance\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.m, r.dim, fmt17(r.sup_distance));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt17(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt17(-2.0), "-2.0000000000000000e0");
    }

    #[test]
    fn eigen_csv_header() {
        let list = EigenvalueList { values: vec![-1.0, 1.0], certified_radius: 1e-11, unresolved: 0 };
        let s = eigenvalues_csv(&["cfg".into()], &list, 1, 1e-10);
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("# cfg"));
        assert_eq!(lines.next(), Some("# n=2, origin=1, tol=1.0000000000000000e-10"));
        assert_eq!(parse_values(&s).unwrap(), vec![-1.0, 1.0]);
    }

    proptest! {
        #[test]
        fn values_round_trip(v in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 1..50)) {
            let a = TridiagonalMatrix::from_diag(v.clone()).unwrap();
            let parsed = parse_values(&matrix_csv(&[], &a)).unwrap();
            prop_assert_eq!(parsed.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), v.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
        }
    }
}
