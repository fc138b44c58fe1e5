//! Named presets and the run-to-CSV driver used by the `sim` binary.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::bounds::run_bounds_suite;
use crate::config::parse_grid;
use crate::csi::{CsiModel, CsiQuality};
use crate::engine::{estimate_all_mg, run_sweep, SweepConfig};
use crate::error::{Error, Result};
use crate::report::{bounds_csv, mg_csv, mg_path, sweep_csv, write_file};

pub const FIG1_ALPHA: [[f64; 2]; 2] = [[1.0, 0.5], [0.0, 0.7]];
pub const FIG2_BITS: [[u32; 2]; 2] = [[6, 3], [3, 6]];
pub const HIGH_SNR_WINDOW_DB: (f64, f64) = (80.0, 140.0);
pub const BOUNDS_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
    MgSuite,
    BoundsSuite,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Fig1,
        Preset::Fig2,
        Preset::Fig3,
        Preset::MgSuite,
        Preset::BoundsSuite,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::MgSuite => "mg_suite",
            Preset::BoundsSuite => "bounds_suite",
        }
    }

    pub fn experiment(&self) -> Experiment {
        let grid = |s: &str| parse_grid(s).expect("preset grid parses");
        match self {
            Preset::Fig1 => {
                let mut cfg = SweepConfig::new(
                    CsiQuality::Alpha(FIG1_ALPHA),
                    CsiModel::Statistical,
                    grid("0:10:140"),
                );
                cfg.mg_window_db = Some(HIGH_SNR_WINDOW_DB);
                Experiment::Sweep(cfg)
            }
            Preset::Fig2 => Experiment::Sweep(SweepConfig::new(
                CsiQuality::Bits(FIG2_BITS),
                CsiModel::Statistical,
                grid("0:5:50"),
            )),
            Preset::Fig3 => Experiment::Sweep(SweepConfig::new(
                CsiQuality::Bits(FIG2_BITS),
                CsiModel::Rvq,
                grid("0:5:50"),
            )),
            Preset::MgSuite => {
                let mut cfg = SweepConfig::new(
                    CsiQuality::Alpha(FIG1_ALPHA),
                    CsiModel::Statistical,
                    grid("80:20:140"),
                );
                cfg.mg_window_db = Some(HIGH_SNR_WINDOW_DB);
                Experiment::Sweep(cfg)
            }
            Preset::BoundsSuite => Experiment::Bounds {
                samples: BOUNDS_SAMPLES,
                seed: 0,
            },
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
                Error::InvalidConfig(format!(
                    "unknown preset `{s}` (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    Sweep(SweepConfig),
    Bounds { samples: usize, seed: u64 },
}

impl Experiment {
    pub fn set_seed(&mut self, s: u64) {
        match self {
            Experiment::Sweep(cfg) => cfg.master_seed = s,
            Experiment::Bounds { seed, .. } => *seed = s,
        }
    }

    /// Trials per channel (or per codebook under RVQ); samples per check for bounds.
    pub fn set_trials(&mut self, n: usize) {
        match self {
            Experiment::Sweep(cfg) => cfg.trials = n,
            Experiment::Bounds { samples, .. } => *samples = n,
        }
    }

    /// Runs the experiment and writes `out` (plus `*_mg.csv` when a slope window is set).
    pub fn run(&self, out: &Path) -> Result<()> {
        match self {
            Experiment::Sweep(cfg) => {
                let records = run_sweep(cfg)?;
                write_file(out, &sweep_csv(&records))?;
                if let Some(window) = cfg.mg_window_db {
                    let mg = estimate_all_mg(&records, window)?;
                    write_file(&mg_path(out), &mg_csv(&mg))?;
                }
                Ok(())
            }
            Experiment::Bounds { samples, seed } => {
                if *samples < 2 {
                    return Err(Error::InvalidConfig(
                        "bounds need at least 2 samples".into(),
                    ));
                }
                write_file(out, &bounds_csv(&run_bounds_suite(*samples, *seed)))
            }
        }
    }
}
