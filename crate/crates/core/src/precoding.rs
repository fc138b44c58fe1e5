//! Zero-forcing precoders computed from distributed CSI.
//!
//! Every transmitter computes a full 2×2 precoder from its own estimates but
//! only implements its own row; the effective precoder stacks row `j` of the
//! matrix computed at TX `j`. Matrices are indexed `[tx][stream]`, so column
//! `i` is the beamformer carrying symbol `i`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::channel::ChannelPair;
use crate::csi::{CsiQuality, EstimateSet};
use crate::error::{Error, Result};
use crate::numerics::{project_orth, CVec2};

pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Below this norm a zero-forcing projection is treated as degenerate.
const DEGENERATE_PROJECTION: f64 = 1e-12;
/// Below this norm a projected beacon is treated as degenerate.
const DEGENERATE_BEACON: f64 = 1e-9;
/// Smallest magnitude allowed for the active transmitter's own entry.
pub const MIN_ACTIVE_ENTRY: f64 = 1e-9;
/// Relative slack before the sum power constraint triggers a rescale.
const POWER_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    PerfectZf,
    Czf,
    Bzf,
    Apzf,
    ApzfHeuristic,
    ApzfQrho,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::PerfectZf,
        Scheme::Czf,
        Scheme::Bzf,
        Scheme::Apzf,
        Scheme::ApzfHeuristic,
        Scheme::ApzfQrho,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::PerfectZf => "perfect_zf",
            Scheme::Czf => "czf",
            Scheme::Bzf => "bzf",
            Scheme::Apzf => "apzf",
            Scheme::ApzfHeuristic => "apzf_heuristic",
            Scheme::ApzfQrho => "apzf_qrho",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown scheme `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    /// Beacon vectors `c₁, c₂` for beacon ZF; unit norm.
    pub beacons: [CVec2; 2],
    /// Feedback bits for the power-control ratio of `apzf_qrho`.
    pub rho_bits: u32,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        let e1 = CVec2::from_real(1.0, 0.0);
        SchemeConfig {
            beacons: [e1, e1],
            rho_bits: 4,
        }
    }
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.beacons.iter().any(|c| !c.is_unit()) {
            return Err(Error::InvalidConfig("beacons must be unit norm".into()));
        }
        if self.rho_bits > 16 {
            return Err(Error::InvalidConfig(format!(
                "rho_bits = {} is too large (max 16)",
                self.rho_bits
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Precoder {
    pub t: Mat2,
    pub scheme: Scheme,
    /// Set when the assembled matrix exceeded the power budget and was scaled down.
    pub clip_applied: bool,
}

impl Precoder {
    pub fn column(&self, stream: usize) -> CVec2 {
        column(&self.t, stream)
    }

    pub fn frobenius_sqr(&self) -> f64 {
        frobenius_sqr(&self.t)
    }
}

pub fn column(t: &Mat2, stream: usize) -> CVec2 {
    CVec2::new(t[0][stream], t[1][stream])
}

fn from_columns(c0: CVec2, c1: CVec2) -> Mat2 {
    [[c0[0], c1[0]], [c0[1], c1[1]]]
}

pub fn frobenius_sqr(t: &Mat2) -> f64 {
    t.iter().flatten().map(|z| z.norm_sqr()).sum()
}

/// Row 1 from `t1` (computed at TX 1), row 2 from `t2` (computed at TX 2).
pub fn assemble_effective(t1: &Mat2, t2: &Mat2) -> Mat2 {
    [t1[0], t2[1]]
}

/// Scales `t` down to `‖t‖_F² = p` when it exceeds the budget.
pub fn enforce_power(t: &Mat2, p: f64) -> (Mat2, bool) {
    let f = frobenius_sqr(t);
    if f <= p * (1.0 + POWER_SLACK) {
        return (*t, false);
    }
    let s = (p / f).sqrt();
    (t.map(|row| row.map(|z| z * s)), true)
}

fn finish(t: Mat2, scheme: Scheme, p: f64) -> Precoder {
    let (t, clip_applied) = enforce_power(&t, p);
    Precoder {
        t,
        scheme,
        clip_applied,
    }
}

/// `√(p/2) · Π⊥_null(target) / ‖Π⊥_null(target)‖`.
fn zf_column(target: &CVec2, null: &CVec2, p: f64) -> Result<CVec2> {
    let v = project_orth(null, target)?;
    let n = v.norm();
    if n < DEGENERATE_PROJECTION {
        return Err(Error::DegenerateChannel(
            "direction is parallel to the one it must be orthogonal to".into(),
        ));
    }
    Ok(v.scale((p / 2.0).sqrt() / n))
}

/// Centralized ZF on the true channel directions.
pub fn zf_perfect(ch: &ChannelPair, p: f64) -> Result<Precoder> {
    let t = from_columns(
        zf_column(&ch.dir[0], &ch.dir[1], p)?,
        zf_column(&ch.dir[1], &ch.dir[0], p)?,
    );
    Ok(finish(t, Scheme::PerfectZf, p))
}

/// Full precoder TX `tx` computes for conventional ZF from its own estimates.
pub fn czf_local(est: &EstimateSet, tx: usize, p: f64) -> Result<Mat2> {
    Ok(from_columns(
        zf_column(est.get(0, tx), est.get(1, tx), p)?,
        zf_column(est.get(1, tx), est.get(0, tx), p)?,
    ))
}

pub fn czf(est: &EstimateSet, p: f64) -> Result<Precoder> {
    let t = assemble_effective(&czf_local(est, 0, p)?, &czf_local(est, 1, p)?);
    Ok(finish(t, Scheme::Czf, p))
}

fn beacon_column(beacon: &CVec2, null: &CVec2, p: f64) -> Result<CVec2> {
    let v = project_orth(null, beacon)?;
    let n = v.norm();
    if n < DEGENERATE_BEACON {
        return Err(Error::DegenerateBeacon);
    }
    Ok(v.scale((p / 2.0).sqrt() / n))
}

/// Beacon ZF at TX `tx`: beam `i` projects the beacon `c_i` away from the
/// estimate of the other receiver's channel. Direct-channel estimates are unused.
pub fn bzf_local(est: &EstimateSet, cfg: &SchemeConfig, tx: usize, p: f64) -> Result<Mat2> {
    Ok(from_columns(
        beacon_column(&cfg.beacons[0], est.get(1, tx), p)?,
        beacon_column(&cfg.beacons[1], est.get(0, tx), p)?,
    ))
}

pub fn bzf(est: &EstimateSet, cfg: &SchemeConfig, p: f64) -> Result<Precoder> {
    let t = assemble_effective(&bzf_local(est, cfg, 0, p)?, &bzf_local(est, cfg, 1, p)?);
    Ok(finish(t, Scheme::Bzf, p))
}

/// The transmitter that solves the orthogonality constraint of beam `stream`:
/// the one with the better estimate of the other receiver's channel, TX 2 on ties.
pub fn active_tx(quality: &CsiQuality, stream: usize) -> usize {
    let victim = 1 - stream;
    if quality.score(victim, 0) > quality.score(victim, 1) {
        0
    } else {
        1
    }
}

fn clip_entry(z: Complex64) -> Complex64 {
    let m = z.norm();
    if m >= MIN_ACTIVE_ENTRY {
        z
    } else if m == 0.0 {
        Complex64::new(MIN_ACTIVE_ENTRY, 0.0)
    } else {
        z * (MIN_ACTIVE_ENTRY / m)
    }
}

/// `|e_passive|² / |e_active|²` for an estimate `e`.
fn rho(e: &CVec2, active: usize) -> f64 {
    e[1 - active].norm_sqr() / clip_entry(e[active]).norm_sqr()
}

/// Beam entries when the passive TX sends `passive_amp` and the active TX
/// solves `eᴴ t = 0` for its own entry.
fn orthogonal_beam(e: &CVec2, active: usize, passive_amp: f64) -> CVec2 {
    let passive = 1 - active;
    let mut t = [ZERO; 2];
    t[passive] = Complex64::new(passive_amp, 0.0);
    t[active] = -(e[passive].conj() * passive_amp) / clip_entry(e[active]).conj();
    CVec2(t)
}

/// Active/passive ZF with the passive transmitter at `√(p / (2·log₂p))`.
///
/// For `p ≤ 2` the log factor is replaced by 1 (no back-off).
pub fn apzf(est: &EstimateSet, quality: &CsiQuality, p: f64) -> Result<Precoder> {
    let amp = (p / (2.0 * p.log2().max(1.0))).sqrt();
    let cols: [CVec2; 2] = std::array::from_fn(|i| {
        let a = active_tx(quality, i);
        orthogonal_beam(est.get(1 - i, a), a, amp)
    });
    Ok(finish(from_columns(cols[0], cols[1]), Scheme::Apzf, p))
}

/// Active/passive ZF where each transmitter normalizes with its own local ratio.
pub fn apzf_heuristic(est: &EstimateSet, quality: &CsiQuality, p: f64) -> Result<Precoder> {
    let scale = (p / 2.0).sqrt();
    let cols: [CVec2; 2] = std::array::from_fn(|i| {
        let a = active_tx(quality, i);
        let pass = 1 - a;
        let e_pass = est.get(1 - i, pass);
        let e_act = est.get(1 - i, a);
        let passive_amp = scale / (1.0 + rho(e_pass, a)).sqrt();
        let active_amp = scale / (1.0 + rho(e_act, a)).sqrt();
        let mut t = [ZERO; 2];
        t[pass] = Complex64::new(passive_amp, 0.0);
        t[a] = -(e_act[pass].conj() * active_amp) / clip_entry(e_act[a]).conj();
        CVec2(t)
    });
    Ok(finish(
        from_columns(cols[0], cols[1]),
        Scheme::ApzfHeuristic,
        p,
    ))
}

/// Scalar quantizer for the power-control ratio: `2^bits` levels uniform in dB
/// over `[-20, 20]` dB, values clipped to the range, round to nearest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoQuantizer {
    levels: u32,
}

impl RhoQuantizer {
    pub const MIN_DB: f64 = -20.0;
    pub const MAX_DB: f64 = 20.0;

    pub fn new(bits: u32) -> Self {
        RhoQuantizer { levels: 1 << bits }
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn level_db(&self, k: u32) -> f64 {
        if self.levels == 1 {
            return 0.5 * (Self::MIN_DB + Self::MAX_DB);
        }
        Self::MIN_DB + k as f64 * (Self::MAX_DB - Self::MIN_DB) / (self.levels - 1) as f64
    }

    pub fn quantize(&self, rho: f64) -> f64 {
        if self.levels == 1 {
            return 10f64.powf(self.level_db(0) / 10.0);
        }
        let db = (10.0 * rho.log10()).clamp(Self::MIN_DB, Self::MAX_DB);
        let step = (Self::MAX_DB - Self::MIN_DB) / (self.levels - 1) as f64;
        let k = ((db - Self::MIN_DB) / step).round() as u32;
        10f64.powf(self.level_db(k.min(self.levels - 1)) / 10.0)
    }
}

/// Active/passive ZF whose passive transmitter learns the active one's ratio
/// `rho`, exactly (`quantizer = None`) or through a scalar quantizer. The active
/// transmitter keeps exact orthogonality to its estimate.
pub fn apzf_rho_feedback(
    est: &EstimateSet,
    quality: &CsiQuality,
    p: f64,
    quantizer: Option<&RhoQuantizer>,
) -> Result<Precoder> {
    let scale = (p / 2.0).sqrt();
    let cols: [CVec2; 2] = std::array::from_fn(|i| {
        let a = active_tx(quality, i);
        let e_act = est.get(1 - i, a);
        let r = rho(e_act, a);
        let r = quantizer.map_or(r, |q| q.quantize(r));
        orthogonal_beam(e_act, a, scale / (1.0 + r).sqrt())
    });
    Ok(finish(from_columns(cols[0], cols[1]), Scheme::ApzfQrho, p))
}

pub fn apzf_qrho(
    est: &EstimateSet,
    quality: &CsiQuality,
    p: f64,
    rho_bits: u32,
) -> Result<Precoder> {
    apzf_rho_feedback(est, quality, p, Some(&RhoQuantizer::new(rho_bits)))
}

/// Dispatches to the precoder of `scheme`.
pub fn precode(
    scheme: Scheme,
    ch: &ChannelPair,
    est: &EstimateSet,
    quality: &CsiQuality,
    cfg: &SchemeConfig,
    p: f64,
) -> Result<Precoder> {
    match scheme {
        Scheme::PerfectZf => zf_perfect(ch, p),
        Scheme::Czf => czf(est, p),
        Scheme::Bzf => bzf(est, cfg, p),
        Scheme::Apzf => apzf(est, quality, p),
        Scheme::ApzfHeuristic => apzf_heuristic(est, quality, p),
        Scheme::ApzfQrho => apzf_qrho(est, quality, p, cfg.rho_bits),
    }
}

/// Angle between the complex lines spanned by `a` and `b`, accurate near zero.
pub fn line_angle(a: &CVec2, b: &CVec2) -> Result<f64> {
    let ua = a.normalized()?;
    let nb = b.norm();
    if nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    let off = project_orth(&ua, b)?.norm();
    let on = ua.inner(b).norm();
    Ok(off.atan2(on))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::draw_channel;
    use crate::csi::{build_estimates, random_direction, Estimator};
    use crate::rng::{stream_rng, Domain};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_diff(a: &Mat2, b: &Mat2) -> f64 {
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    fn fig2_quality() -> CsiQuality {
        CsiQuality::Bits([[6, 3], [3, 6]])
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.as_str().parse::<Scheme>().unwrap(), s);
        }
        assert!("zf".parse::<Scheme>().is_err());
    }

    #[test]
    fn orthogonal_channels_give_identity() {
        let ch = ChannelPair::from_vectors(CVec2::from_real(1.0, 0.0), CVec2::from_real(0.0, 1.0))
            .unwrap();
        let pre = zf_perfect(&ch, 2.0).unwrap();
        let id = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        assert!(max_diff(&pre.t, &id) < 1e-15);
    }

    #[test]
    fn perfect_zf_power_and_nulls() {
        let mut rng = stream_rng(1, Domain::Trial, 0);
        for k in 0..1000 {
            let p = 10f64.powf(k as f64 % 15.0);
            let ch = draw_channel(&mut rng);
            let pre = zf_perfect(&ch, p).unwrap();
            for i in 0..2 {
                let col = pre.column(i);
                assert!((col.norm_sqr() - p / 2.0).abs() <= 1e-12 * p);
                assert!(ch.h[1 - i].inner(&col).norm() <= 1e-10 * p.sqrt());
            }
            assert!(!pre.clip_applied);
        }
    }

    #[test]
    fn parallel_channels_are_degenerate() {
        let d = CVec2::from_real(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        let ch = ChannelPair::from_vectors(d, d.scale(2.0)).unwrap();
        assert!(matches!(
            zf_perfect(&ch, 10.0),
            Err(Error::DegenerateChannel(_))
        ));
    }

    #[test]
    fn assemble_mixes_rows() {
        let ones = [[c(1.0, 0.0); 2]; 2];
        let twos = [[c(2.0, 0.0); 2]; 2];
        assert_eq!(assemble_effective(&ones, &ones), ones);
        assert_eq!(
            assemble_effective(&ones, &twos),
            [[c(1.0, 0.0), c(1.0, 0.0)], [c(2.0, 0.0), c(2.0, 0.0)]]
        );
    }

    #[test]
    fn czf_with_perfect_estimates_matches_perfect_zf() {
        let mut rng = stream_rng(2, Domain::Trial, 0);
        for _ in 0..1000 {
            let ch = draw_channel(&mut rng);
            let a = czf(&EstimateSet::perfect(&ch), 50.0).unwrap();
            let b = zf_perfect(&ch, 50.0).unwrap();
            assert!(max_diff(&a.t, &b.t) <= 1e-12);
        }
    }

    #[test]
    fn czf_with_shared_estimates_is_centralized() {
        let mut rng = stream_rng(3, Domain::Trial, 0);
        let p = 1e3;
        for _ in 0..1000 {
            let dirs = [random_direction(&mut rng), random_direction(&mut rng)];
            let est = EstimateSet::shared(dirs);
            let pre = czf(&est, p).unwrap();
            assert_eq!(pre.t, czf_local(&est, 0, p).unwrap());
            for i in 0..2 {
                assert!(dirs[1 - i].inner(&pre.column(i)).norm_sqr() <= 1e-20 * p);
            }
        }
    }

    #[test]
    fn czf_with_disagreeing_estimates_mixes_rows() {
        let mut rng = stream_rng(4, Domain::Trial, 0);
        let ch = draw_channel(&mut rng);
        let est = build_estimates(
            &ch,
            &fig2_quality(),
            Estimator::Statistical,
            100.0,
            &mut rng,
        )
        .unwrap();
        let t1 = czf_local(&est, 0, 100.0).unwrap();
        let t2 = czf_local(&est, 1, 100.0).unwrap();
        let mixed = assemble_effective(&t1, &t2);
        assert_ne!(mixed, t1);
        assert_ne!(mixed, t2);
    }

    #[test]
    fn bzf_ignores_direct_channel_estimates() {
        let mut rng = stream_rng(5, Domain::Trial, 0);
        let cfg = SchemeConfig::default();
        for _ in 0..200 {
            let mut est = EstimateSet {
                est: std::array::from_fn(|_| std::array::from_fn(|_| random_direction(&mut rng))),
            };
            let before = bzf(&est, &cfg, 10.0).unwrap();
            // beam 1 only depends on estimates of h2 and vice versa
            est.est[0] = [random_direction(&mut rng), random_direction(&mut rng)];
            let after = bzf(&est, &cfg, 10.0).unwrap();
            assert!(line_angle(&before.column(0), &after.column(0)).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn bzf_with_shared_estimate_is_exactly_orthogonal() {
        let mut rng = stream_rng(6, Domain::Trial, 0);
        let cfg = SchemeConfig::default();
        let p = 1e4;
        for _ in 0..1000 {
            let dirs = [random_direction(&mut rng), random_direction(&mut rng)];
            let pre = bzf(&EstimateSet::shared(dirs), &cfg, p).unwrap();
            for i in 0..2 {
                assert!(dirs[1 - i].inner(&pre.column(i)).norm() <= 1e-10 * p.sqrt());
            }
        }
    }

    #[test]
    fn bzf_rejects_parallel_beacon() {
        let e1 = CVec2::from_real(1.0, 0.0);
        let est = EstimateSet::shared([CVec2::from_real(0.0, 1.0), e1]);
        assert_eq!(
            bzf(&est, &SchemeConfig::default(), 10.0),
            Err(Error::DegenerateBeacon)
        );
    }

    #[test]
    fn active_selection_follows_quality() {
        let q = CsiQuality::Alpha([[1.0, 0.5], [0.0, 0.7]]);
        // beam 1 interferes at RX 2: TX 2 knows h2 best
        assert_eq!(active_tx(&q, 0), 1);
        assert_eq!(active_tx(&q, 1), 0);
        let tie = CsiQuality::Bits([[4, 4], [4, 4]]);
        assert_eq!(active_tx(&tie, 0), 1);
        assert_eq!(active_tx(&tie, 1), 1);
    }

    #[test]
    fn apzf_analytic_orthogonality() {
        // beam 1 with est[2][2] = (1,1)/√2 and TX 2 active → t ∝ (1, −1)
        let d = CVec2::from_real(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        let est = EstimateSet::shared([CVec2::from_real(0.6, 0.8), d]);
        let q = CsiQuality::Bits([[0, 0], [0, 1]]);
        let p = 1024.0;
        let pre = apzf(&est, &q, p).unwrap();
        let col = pre.column(0);
        let amp = (p / 20.0).sqrt();
        assert!((col[0] - c(amp, 0.0)).norm() < 1e-12);
        assert!((col[1] - c(-amp, 0.0)).norm() < 1e-12);
        assert!(d.inner(&col).norm() <= 1e-10 * p.sqrt());
    }

    #[test]
    fn apzf_passive_share_vanishes() {
        let q = CsiQuality::Alpha([[1.0, 0.5], [0.0, 0.7]]);
        let mut rng = stream_rng(7, Domain::Trial, 0);
        let ch = draw_channel(&mut rng);
        let mut prev = f64::INFINITY;
        for db in [20.0, 60.0, 100.0, 140.0] {
            let p = 10f64.powf(db / 10.0);
            let est = EstimateSet::perfect(&ch);
            let pre = apzf(&est, &q, p).unwrap();
            // passive TX for beam 1 is TX 1
            let share = pre.column(0)[0].norm_sqr() / p;
            if !pre.clip_applied {
                assert!((share - 1.0 / (2.0 * p.log2())).abs() < 1e-12);
            }
            assert!(share < prev);
            prev = share;
        }
    }

    #[test]
    fn apzf_handles_tiny_active_entry() {
        let e = CVec2::from_real(1.0, 0.0);
        let est = EstimateSet::shared([CVec2::from_real(0.6, 0.8), e]);
        let pre = apzf(&est, &CsiQuality::Perfect, 1e3).unwrap();
        assert!(pre
            .t
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite()));
        assert!(pre.clip_applied);
        assert!(pre.frobenius_sqr() <= 1e3 * (1.0 + 1e-9));
    }

    #[test]
    fn heuristic_with_agreeing_estimates_is_unit_zf() {
        let mut rng = stream_rng(8, Domain::Trial, 0);
        let q = fig2_quality();
        let p = 100.0;
        for _ in 0..1000 {
            let dirs = [random_direction(&mut rng), random_direction(&mut rng)];
            let est = EstimateSet::shared(dirs);
            let h = apzf_heuristic(&est, &q, p).unwrap();
            let z = czf(&est, p).unwrap();
            for i in 0..2 {
                let col = h.column(i);
                assert!((col.norm_sqr() - p / 2.0).abs() <= 1e-9 * p);
                assert!(dirs[1 - i].inner(&col).norm() <= 1e-10 * p.sqrt());
                assert!(line_angle(&col, &z.column(i)).unwrap() <= 1e-9);
            }
        }
    }

    #[test]
    fn heuristic_loses_orthogonality_when_estimates_differ() {
        let mut rng = stream_rng(9, Domain::Trial, 0);
        let q = fig2_quality();
        let p = 100.0;
        for _ in 0..1000 {
            let ch = draw_channel(&mut rng);
            let est = build_estimates(&ch, &q, Estimator::Statistical, p, &mut rng).unwrap();
            let h = apzf_heuristic(&est, &q, p).unwrap();
            for i in 0..2 {
                let a = active_tx(&q, i);
                assert!(est.get(1 - i, a).inner(&h.column(i)).norm() > 0.0);
            }
        }
    }

    #[test]
    fn rho_quantizer_grid() {
        let q = RhoQuantizer::new(4);
        assert_eq!(q.levels(), 16);
        assert_eq!(q.level_db(0), -20.0);
        assert_eq!(q.level_db(15), 20.0);
        assert!((q.quantize(1e-6) - 0.01).abs() < 1e-15);
        assert!((q.quantize(1e6) - 100.0).abs() < 1e-12);
        for k in 0..16 {
            let r = 10f64.powf(q.level_db(k) / 10.0);
            assert!((q.quantize(r) - r).abs() <= 1e-12 * r);
        }
        // 0 dB falls between levels 7 and 8 (−1.33 and +1.33 dB)
        let zero = q.quantize(1.0);
        assert!((10.0 * zero.log10()).abs() - 4.0 / 3.0 < 1e-9);
    }

    #[test]
    fn qrho_on_grid_equals_exact_rho() {
        let qz = RhoQuantizer::new(4);
        let q = fig2_quality();
        // beam 1: TX 2 active, rho on level 3; beam 2: TX 1 active, rho on level 10
        let r1 = 10f64.powf(qz.level_db(3) / 10.0);
        let a2 = 1.0 / (1.0 + r1).sqrt();
        let e_beam1 = CVec2::new(c(r1.sqrt() * a2, 0.0), c(0.0, a2));
        let r2 = 10f64.powf(qz.level_db(10) / 10.0);
        let a1 = 1.0 / (1.0 + r2).sqrt();
        let e_beam2 = CVec2::new(c(a1, 0.0), c(-0.6 * r2.sqrt() * a1, 0.8 * r2.sqrt() * a1));
        let est = EstimateSet::shared([e_beam2, e_beam1]);
        let p = 500.0;
        let exact = apzf_rho_feedback(&est, &q, p, None).unwrap();
        let quant = apzf_qrho(&est, &q, p, 4).unwrap();
        assert!(!exact.clip_applied && !quant.clip_applied);
        for i in 0..2 {
            assert!((exact.column(i) - quant.column(i)).norm() <= 1e-12 * p.sqrt());
        }
    }

    #[test]
    fn qrho_keeps_exact_orthogonality() {
        let mut rng = stream_rng(10, Domain::Trial, 0);
        let q = fig2_quality();
        for k in 0..2000 {
            let p = 10f64.powf((k % 11) as f64 / 2.0);
            let ch = draw_channel(&mut rng);
            let est = build_estimates(&ch, &q, Estimator::Statistical, p, &mut rng).unwrap();
            let pre = apzf_qrho(&est, &q, p, 4).unwrap();
            for i in 0..2 {
                let a = active_tx(&q, i);
                assert!(est.get(1 - i, a).inner(&pre.column(i)).norm() <= 1e-10 * p.sqrt());
            }
            assert!(pre.frobenius_sqr() <= p * (1.0 + 1e-9));
        }
    }

    #[test]
    fn precoders_are_deterministic() {
        let mut rng = stream_rng(11, Domain::Trial, 0);
        let ch = draw_channel(&mut rng);
        let q = fig2_quality();
        let est = build_estimates(&ch, &q, Estimator::Statistical, 30.0, &mut rng).unwrap();
        let cfg = SchemeConfig::default();
        for s in Scheme::ALL {
            let a = precode(s, &ch, &est, &q, &cfg, 30.0).unwrap();
            let b = precode(s, &ch, &est, &q, &cfg, 30.0).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.scheme, s);
        }
    }
}
