//! Monte Carlo evaluation of rates, SNR sweeps and multiplexing-gain fits.
//!
//! Randomness is keyed per trial: trial `t` draws its channel and estimation
//! noise from `stream_rng(master_seed, Trial, t)`, and codebook realization `b`
//! from `stream_rng(master_seed, Codebook, b)`. The same streams are reused at
//! every SNR point and for every scheme, so all curves of a sweep are paired.
//! Per-trial results are collected in trial order and summed sequentially with
//! compensated summation; output does not depend on the worker count.

use rayon::prelude::*;

use crate::channel::{draw_channel, ChannelPair};
use crate::csi::{build_estimates, CodebookSet, CsiModel, CsiQuality, Estimator};
use crate::error::{Error, Result};
use crate::precoding::{precode, Precoder, Scheme, SchemeConfig};
use crate::rng::{stream_rng, Domain};

/// Linear SNR from dB. Noise power is 1, so this is the power budget `P`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `log₂P` for an SNR in dB.
pub fn db_to_log2(db: f64) -> f64 {
    db * std::f64::consts::LOG2_10 / 10.0
}

/// Per-receiver rates `log₂(1 + |h_iᴴt_i|² / (1 + |h_iᴴt_ī|²))` on the true channel.
pub fn instantaneous_rate(ch: &ChannelPair, pre: &Precoder) -> [f64; 2] {
    std::array::from_fn(|i| {
        let signal = ch.h[i].inner(&pre.column(i)).norm_sqr();
        let interference = ch.h[i].inner(&pre.column(1 - i)).norm_sqr();
        (signal / (1.0 + interference)).ln_1p() / std::f64::consts::LN_2
    })
}

/// `I_i = |h_iᴴ t_ī|²`.
pub fn interference(ch: &ChannelPair, pre: &Precoder) -> [f64; 2] {
    std::array::from_fn(|i| ch.h[i].inner(&pre.column(1 - i)).norm_sqr())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub quality: CsiQuality,
    pub model: CsiModel,
    pub schemes: Vec<Scheme>,
    pub snr_grid_db: Vec<f64>,
    /// Channel draws per SNR point (statistical) or per codebook realization (RVQ).
    pub trials: usize,
    /// Codebook realizations (RVQ only).
    pub codebooks: usize,
    pub master_seed: u64,
    pub shared_codebooks: bool,
    pub scheme_cfg: SchemeConfig,
    pub mg_window_db: Option<(f64, f64)>,
}

impl SweepConfig {
    pub fn new(quality: CsiQuality, model: CsiModel, snr_grid_db: Vec<f64>) -> Self {
        SweepConfig {
            quality,
            model,
            schemes: Scheme::ALL.to_vec(),
            snr_grid_db,
            trials: match model {
                CsiModel::Statistical => 10_000,
                CsiModel::Rvq => 1000,
            },
            codebooks: 100,
            master_seed: 0,
            shared_codebooks: false,
            scheme_cfg: SchemeConfig::default(),
            mg_window_db: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.quality.validate()?;
        self.scheme_cfg.validate()?;
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.model == CsiModel::Rvq && self.codebooks == 0 {
            return Err(Error::InvalidConfig("codebooks must be at least 1".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::InvalidConfig("no schemes selected".into()));
        }
        for (k, s) in self.schemes.iter().enumerate() {
            if self.schemes[..k].contains(s) {
                return Err(Error::InvalidConfig(format!("scheme `{s}` listed twice")));
            }
        }
        if self.snr_grid_db.is_empty() {
            return Err(Error::InvalidConfig("SNR grid is empty".into()));
        }
        if self.snr_grid_db.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig(
                "SNR grid has non-finite values".into(),
            ));
        }
        if self.snr_grid_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig(
                "SNR grid must be strictly increasing".into(),
            ));
        }
        if let Some((lo, hi)) = self.mg_window_db {
            if !(lo < hi) {
                return Err(Error::InvalidConfig(format!(
                    "MG window [{lo}, {hi}] must have lo < hi"
                )));
            }
        }
        Ok(())
    }

    /// Trials averaged per SNR point.
    pub fn total_trials(&self) -> usize {
        match self.model {
            CsiModel::Statistical => self.trials,
            CsiModel::Rvq => self.trials * self.codebooks,
        }
    }

    /// Schemes in canonical order.
    pub fn sorted_schemes(&self) -> Vec<Scheme> {
        let mut s = self.schemes.clone();
        s.sort();
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub rates: [f64; 2],
    pub interference: [f64; 2],
    pub power: f64,
    pub clipped: bool,
}

/// Raw per-trial results at one SNR point, `outcomes[scheme][trial]`.
#[derive(Debug, Clone)]
pub struct PointSamples {
    pub snr_db: f64,
    pub schemes: Vec<Scheme>,
    pub outcomes: Vec<Vec<TrialOutcome>>,
}

impl PointSamples {
    pub fn for_scheme(&self, scheme: Scheme) -> Option<&[TrialOutcome]> {
        let k = self.schemes.iter().position(|&s| s == scheme)?;
        Some(&self.outcomes[k])
    }

    pub fn sum_rates(&self, scheme: Scheme) -> Option<Vec<f64>> {
        self.for_scheme(scheme)
            .map(|o| o.iter().map(|t| t.rates[0] + t.rates[1]).collect())
    }
}

fn evaluate_trial(
    cfg: &SweepConfig,
    schemes: &[Scheme],
    trial: u64,
    p: f64,
    estimator: Estimator<'_>,
) -> Result<Vec<TrialOutcome>> {
    let mut rng = stream_rng(cfg.master_seed, Domain::Trial, trial);
    let ch = draw_channel(&mut rng);
    let est = build_estimates(&ch, &cfg.quality, estimator, p, &mut rng)?;
    schemes
        .iter()
        .map(|&s| {
            let pre = precode(s, &ch, &est, &cfg.quality, &cfg.scheme_cfg, p)?;
            Ok(TrialOutcome {
                rates: instantaneous_rate(&ch, &pre),
                interference: interference(&ch, &pre),
                power: pre.frobenius_sqr(),
                clipped: pre.clip_applied,
            })
        })
        .collect()
}

/// Runs every trial of one SNR point and keeps the raw outcomes.
pub fn simulate_point(cfg: &SweepConfig, snr_db: f64) -> Result<PointSamples> {
    cfg.validate()?;
    let p = db_to_linear(snr_db);
    let schemes = cfg.sorted_schemes();
    let per_trial: Vec<Vec<TrialOutcome>> = match cfg.model {
        CsiModel::Statistical => (0..cfg.trials as u64)
            .into_par_iter()
            .map(|t| evaluate_trial(cfg, &schemes, t, p, Estimator::Statistical))
            .collect::<Result<_>>()?,
        CsiModel::Rvq => {
            let mut all = Vec::with_capacity(cfg.total_trials());
            for b in 0..cfg.codebooks as u64 {
                let mut crng = stream_rng(cfg.master_seed, Domain::Codebook, b);
                let books =
                    CodebookSet::generate(&cfg.quality, p, cfg.shared_codebooks, &mut crng)?;
                let base = b * cfg.trials as u64;
                let chunk: Vec<Vec<TrialOutcome>> = (0..cfg.trials as u64)
                    .into_par_iter()
                    .map(|k| evaluate_trial(cfg, &schemes, base + k, p, Estimator::Rvq(&books)))
                    .collect::<Result<_>>()?;
                all.extend(chunk);
            }
            all
        }
    };
    let mut outcomes = vec![Vec::with_capacity(per_trial.len()); schemes.len()];
    for trial in per_trial {
        for (k, o) in trial.into_iter().enumerate() {
            outcomes[k].push(o);
        }
    }
    Ok(PointSamples {
        snr_db,
        schemes,
        outcomes,
    })
}

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        iter.into_iter().for_each(|x| s.add(x));
        s
    }
}

/// Sample mean and standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().copied().collect::<CompensatedSum>().value() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss = xs
        .iter()
        .map(|x| (x - mean) * (x - mean))
        .collect::<CompensatedSum>()
        .value();
    (mean, (ss / (n - 1.0) / n).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub scheme: Scheme,
    pub model: CsiModel,
    pub snr_db: f64,
    pub rate_rx1: f64,
    pub rate_rx2: f64,
    pub sum_rate: f64,
    /// Standard error of `sum_rate`.
    pub sum_rate_se: f64,
    pub trials: usize,
    pub clip_fraction: f64,
    pub seed: u64,
}

impl SweepRecord {
    fn from_outcomes(cfg: &SweepConfig, scheme: Scheme, snr_db: f64, o: &[TrialOutcome]) -> Self {
        let n = o.len() as f64;
        let r1 = o
            .iter()
            .map(|t| t.rates[0])
            .collect::<CompensatedSum>()
            .value()
            / n;
        let r2 = o
            .iter()
            .map(|t| t.rates[1])
            .collect::<CompensatedSum>()
            .value()
            / n;
        let sums: Vec<f64> = o.iter().map(|t| t.rates[0] + t.rates[1]).collect();
        let (_, se) = mean_and_se(&sums);
        let clips = o.iter().filter(|t| t.clipped).count();
        SweepRecord {
            scheme,
            model: cfg.model,
            snr_db,
            rate_rx1: r1,
            rate_rx2: r2,
            sum_rate: r1 + r2,
            sum_rate_se: se,
            trials: o.len(),
            clip_fraction: clips as f64 / n,
            seed: cfg.master_seed,
        }
    }
}

/// Mean rates for every scheme over the SNR grid, sorted by (scheme, snr).
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    let mut records = Vec::new();
    for &snr in &cfg.snr_grid_db {
        let point = simulate_point(cfg, snr)?;
        for (scheme, o) in point.schemes.iter().zip(&point.outcomes) {
            records.push(SweepRecord::from_outcomes(cfg, *scheme, snr, o));
        }
    }
    records.sort_by(|a, b| a.scheme.cmp(&b.scheme).then(a.snr_db.total_cmp(&b.snr_db)));
    Ok(records)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MgEstimate {
    pub scheme: Scheme,
    pub slope_rx1: f64,
    pub slope_rx2: f64,
    pub slope_total: f64,
    pub window_db: (f64, f64),
    /// RMS residual of the sum-rate fit, in bits.
    pub residual: f64,
    pub points: usize,
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Fits the rates of `scheme` against `log₂P` over the SNR window (inclusive).
pub fn estimate_mg(
    records: &[SweepRecord],
    scheme: Scheme,
    window_db: (f64, f64),
) -> Result<MgEstimate> {
    let (lo, hi) = window_db;
    let pts: Vec<&SweepRecord> = records
        .iter()
        .filter(|r| r.scheme == scheme && r.snr_db >= lo - 1e-9 && r.snr_db <= hi + 1e-9)
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientPoints { found: pts.len() });
    }
    let x: Vec<f64> = pts.iter().map(|r| db_to_log2(r.snr_db)).collect();
    let fit = |f: fn(&SweepRecord) -> f64| {
        let y: Vec<f64> = pts.iter().map(|r| f(r)).collect();
        linear_fit(&x, &y)
    };
    let (s1, _) = fit(|r| r.rate_rx1);
    let (s2, _) = fit(|r| r.rate_rx2);
    let (st, icept) = fit(|r| r.sum_rate);
    let residual = (pts
        .iter()
        .zip(&x)
        .map(|(r, xi)| (r.sum_rate - (st * xi + icept)).powi(2))
        .sum::<f64>()
        / pts.len() as f64)
        .sqrt();
    Ok(MgEstimate {
        scheme,
        slope_rx1: s1,
        slope_rx2: s2,
        slope_total: st,
        window_db,
        residual,
        points: pts.len(),
    })
}

/// [`estimate_mg`] for every scheme present in `records`, in canonical order.
pub fn estimate_all_mg(records: &[SweepRecord], window_db: (f64, f64)) -> Result<Vec<MgEstimate>> {
    let mut schemes: Vec<Scheme> = records.iter().map(|r| r.scheme).collect();
    schemes.sort();
    schemes.dedup();
    schemes
        .into_iter()
        .map(|s| estimate_mg(records, s, window_db))
        .collect()
}
