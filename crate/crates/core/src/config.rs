//! TOML sweep configuration.
//!
//! ```toml
//! model = "rvq"                 # or "statistical" (default)
//! schemes = ["czf", "bzf"]      # default: all six
//! snr_db = "0:5:50"             # or an explicit list [0, 10, 20]
//! trials = 1000                 # default 10000 (statistical) / 1000 (rvq)
//! codebooks = 100
//! seed = 0
//! shared_codebooks = false
//! rho_bits = 4
//! mg_window_db = [80, 140]      # optional; enables the slope fit
//!
//! [quality]
//! mode = "bits"                 # or "alpha"
//! values = [[6, 3], [3, 6]]     # [rx][tx]
//! ```

use serde::Deserialize;
use toml::Spanned;

use crate::csi::{CsiModel, CsiQuality, MAX_BITS};
use crate::engine::SweepConfig;
use crate::error::{Error, Result};
use crate::precoding::Scheme;

pub const DEFAULT_SNR_GRID: &str = "0:5:50";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: Option<Spanned<String>>,
    quality: Option<Spanned<RawQuality>>,
    schemes: Option<Spanned<Vec<Spanned<String>>>>,
    snr_db: Option<Spanned<RawGrid>>,
    trials: Option<Spanned<i64>>,
    codebooks: Option<Spanned<i64>>,
    seed: Option<Spanned<i64>>,
    shared_codebooks: Option<bool>,
    rho_bits: Option<Spanned<i64>>,
    mg_window_db: Option<Spanned<[f64; 2]>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuality {
    mode: Spanned<String>,
    values: Spanned<[[f64; 2]; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawGrid {
    List(Vec<f64>),
    Range(String),
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())]
        .bytes()
        .filter(|&b| b == b'\n')
        .count()
        + 1
}

fn err_at<T>(text: &str, spanned: &Spanned<T>, message: impl Into<String>) -> Error {
    Error::Parse {
        line: line_of(text, spanned.span().start),
        message: message.into(),
    }
}

/// Expands `start:step:stop` (inclusive) into a grid.
pub fn parse_grid(spec: &str) -> std::result::Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let [start, step, stop] = parts[..] else {
        return Err(format!("expected start:step:stop, got `{spec}`"));
    };
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| format!("`{s}` is not a number in `{spec}`"))
    };
    let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
    if !(step > 0.0) || stop < start {
        return Err(format!("`{spec}` does not describe an increasing grid"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

fn non_negative(text: &str, v: &Spanned<i64>, key: &str) -> Result<u64> {
    u64::try_from(*v.get_ref())
        .map_err(|_| err_at(text, v, format!("`{key}` must be non-negative")))
}

fn positive(text: &str, v: &Spanned<i64>, key: &str) -> Result<usize> {
    match *v.get_ref() {
        n if n >= 1 => Ok(n as usize),
        _ => Err(err_at(text, v, format!("`{key}` must be at least 1"))),
    }
}

fn quality_from(text: &str, raw: &RawQuality) -> Result<CsiQuality> {
    let values = *raw.values.get_ref();
    match raw.mode.get_ref().as_str() {
        "alpha" => {
            if let Some(v) = values.iter().flatten().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(err_at(
                    text,
                    &raw.values,
                    format!("alpha value {v} is outside [0, 1]"),
                ));
            }
            Ok(CsiQuality::Alpha(values))
        }
        "bits" => {
            let mut bits = [[0u32; 2]; 2];
            for (i, row) in values.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    if v.fract() != 0.0 || v < 0.0 || v > MAX_BITS as f64 {
                        return Err(err_at(
                            text,
                            &raw.values,
                            format!("bit count {v} must be an integer in 0..={MAX_BITS}"),
                        ));
                    }
                    bits[i][j] = v as u32;
                }
            }
            Ok(CsiQuality::Bits(bits))
        }
        other => Err(err_at(
            text,
            &raw.mode,
            format!("quality.mode must be `alpha` or `bits`, got `{other}`"),
        )),
    }
}

/// Parses and validates a TOML sweep configuration. Unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<SweepConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map_or(0, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;

    let Some(quality) = &raw.quality else {
        return Err(Error::Parse {
            line: 0,
            message: "missing required table `quality`".into(),
        });
    };
    let quality = quality_from(text, quality.get_ref())?;

    let model = match &raw.model {
        Some(m) => m
            .get_ref()
            .parse::<CsiModel>()
            .map_err(|e| err_at(text, m, e.to_string()))?,
        None => CsiModel::Statistical,
    };

    let grid = match &raw.snr_db {
        Some(g) => match g.get_ref() {
            RawGrid::List(v) => v.clone(),
            RawGrid::Range(s) => parse_grid(s).map_err(|m| err_at(text, g, m))?,
        },
        None => parse_grid(DEFAULT_SNR_GRID).expect("default grid parses"),
    };

    let mut cfg = SweepConfig::new(quality, model, grid);

    if let Some(list) = &raw.schemes {
        cfg.schemes = list
            .get_ref()
            .iter()
            .map(|s| {
                s.get_ref()
                    .parse::<Scheme>()
                    .map_err(|e| err_at(text, s, e.to_string()))
            })
            .collect::<Result<_>>()?;
    }
    if let Some(t) = &raw.trials {
        cfg.trials = positive(text, t, "trials")?;
    }
    if let Some(c) = &raw.codebooks {
        cfg.codebooks = positive(text, c, "codebooks")?;
    }
    if let Some(s) = &raw.seed {
        cfg.master_seed = non_negative(text, s, "seed")?;
    }
    if let Some(b) = raw.shared_codebooks {
        cfg.shared_codebooks = b;
    }
    if let Some(r) = &raw.rho_bits {
        let bits = non_negative(text, r, "rho_bits")?;
        cfg.scheme_cfg.rho_bits = u32::try_from(bits).unwrap_or(u32::MAX);
    }
    if let Some(w) = &raw.mg_window_db {
        let [lo, hi] = *w.get_ref();
        cfg.mg_window_db = Some((lo, hi));
    }

    cfg.validate().map_err(|e| {
        let line = match &e {
            Error::InvalidConfig(m) if m.contains("SNR") => raw
                .snr_db
                .as_ref()
                .map_or(0, |g| line_of(text, g.span().start)),
            Error::InvalidConfig(m) if m.contains("MG window") => raw
                .mg_window_db
                .as_ref()
                .map_or(0, |g| line_of(text, g.span().start)),
            Error::InvalidConfig(m) if m.contains("scheme") => raw
                .schemes
                .as_ref()
                .map_or(0, |g| line_of(text, g.span().start)),
            Error::InvalidConfig(m) if m.contains("rho_bits") => raw
                .rho_bits
                .as_ref()
                .map_or(0, |g| line_of(text, g.span().start)),
            _ => 0,
        };
        Error::Parse {
            line,
            message: e.to_string(),
        }
    })?;
    Ok(cfg)
}
