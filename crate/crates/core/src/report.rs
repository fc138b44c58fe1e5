//! CSV output. Numbers are written with 9 significant digits.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::bounds::{BoundCheck, BoundsSuite};
use crate::engine::{MgEstimate, SweepRecord};
use crate::error::{Error, Result};

pub const SWEEP_HEADER: &str =
    "scheme,model,snr_db,rate_rx1,rate_rx2,sum_rate,trials,clip_fraction,seed";
pub const MG_HEADER: &str =
    "scheme,slope_rx1,slope_rx2,slope_total,window_lo_db,window_hi_db,residual";
pub const BOUNDS_HEADER: &str =
    "law,bits,quantity,empirical,std_err,oracle,lower,upper,pass,samples";

/// Rounds to 9 significant digits and prints the shortest decimal that round-trips.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    // avoid "-0"
    if rounded == 0.0 {
        return "0".into();
    }
    rounded.to_string()
}

pub fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.scheme,
            r.model,
            fmt_num(r.snr_db),
            fmt_num(r.rate_rx1),
            fmt_num(r.rate_rx2),
            fmt_num(r.sum_rate),
            r.trials,
            fmt_num(r.clip_fraction),
            r.seed
        );
    }
    out
}

pub fn mg_csv(estimates: &[MgEstimate]) -> String {
    let mut out = String::from(MG_HEADER);
    out.push('\n');
    for m in estimates {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            m.scheme,
            fmt_num(m.slope_rx1),
            fmt_num(m.slope_rx2),
            fmt_num(m.slope_total),
            fmt_num(m.window_db.0),
            fmt_num(m.window_db.1),
            fmt_num(m.residual)
        );
    }
    out
}

fn bound_row(
    out: &mut String,
    law: &str,
    bits: u32,
    quantity: &str,
    c: &BoundCheck,
    samples: usize,
) {
    let oracle = c.oracle.map(fmt_num).unwrap_or_default();
    let _ = writeln!(
        out,
        "{law},{bits},{quantity},{},{},{oracle},{},{},{},{samples}",
        fmt_num(c.empirical),
        fmt_num(c.std_err),
        fmt_num(c.lower),
        fmt_num(c.upper),
        c.pass
    );
}

/// CDF points appear with `bits = 0` (a single codeword) and quantity `cdf@x`.
pub fn bounds_csv(suite: &BoundsSuite) -> String {
    let mut out = String::from(BOUNDS_HEADER);
    out.push('\n');
    for report in &suite.cdf {
        for p in &report.points {
            let check = BoundCheck {
                empirical: p.empirical,
                std_err: p.std_err,
                oracle: Some(p.uniform_exact),
                lower: p.lower,
                upper: p.upper,
                pass: p.pass,
            };
            let quantity = format!("cdf@{}", fmt_num(p.x));
            bound_row(
                &mut out,
                report.law.as_str(),
                0,
                &quantity,
                &check,
                report.samples,
            );
        }
    }
    for r in &suite.reports {
        if let Some(c) = &r.distortion {
            bound_row(
                &mut out,
                r.law.as_str(),
                r.bits,
                "mean_distortion",
                c,
                r.samples,
            );
        }
        if let Some(c) = &r.log_distortion {
            bound_row(
                &mut out,
                r.law.as_str(),
                r.bits,
                "mean_neg_log2_distortion",
                c,
                r.samples,
            );
        }
    }
    out
}

/// `runs/fig1.csv` becomes `runs/fig1_mg.csv`.
pub fn mg_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}_mg.csv"))
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csi::CsiModel;
    use crate::precoding::Scheme;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(0.1), "0.1");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_num(123456.789012), "123456.789");
        assert_eq!(fmt_num(2.0 / 3.0 * 1e-3), "0.000666666667");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(-1.5), "-1.5");
        assert_eq!(fmt_num(140.0), "140");
        assert_eq!(fmt_num(f64::NAN), "NaN");
    }

    #[test]
    fn sweep_rows() {
        let r = SweepRecord {
            scheme: Scheme::ApzfQrho,
            model: CsiModel::Rvq,
            snr_db: 50.0,
            rate_rx1: 1.25,
            rate_rx2: 2.0 / 3.0,
            sum_rate: 1.25 + 2.0 / 3.0,
            sum_rate_se: 0.01,
            trials: 1000,
            clip_fraction: 0.0,
            seed: 7,
        };
        let csv = sweep_csv(&[r]);
        assert_eq!(
            csv,
            format!("{SWEEP_HEADER}\napzf_qrho,rvq,50,1.25,0.666666667,1.91666667,1000,0,7\n")
        );
    }

    #[test]
    fn mg_rows_and_path() {
        let m = MgEstimate {
            scheme: Scheme::Bzf,
            slope_rx1: 0.25,
            slope_rx2: 0.25,
            slope_total: 0.5,
            window_db: (80.0, 140.0),
            residual: 0.001,
            points: 7,
        };
        assert_eq!(
            mg_csv(&[m]),
            format!("{MG_HEADER}\nbzf,0.25,0.25,0.5,80,140,0.001\n")
        );
        assert_eq!(
            mg_path(Path::new("runs/fig1.csv")),
            PathBuf::from("runs/fig1_mg.csv")
        );
        assert_eq!(mg_path(Path::new("out")), PathBuf::from("out_mg.csv"));
    }
}
