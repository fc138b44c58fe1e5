//! Empirical checks of the random-vector-quantization distortion bounds for
//! unit vectors in `R^3` (complex dimension 2).
//!
//! With `K = 2^B` independent codewords the bounds read
//!
//! * CDF of one codeword's distortion: `c₃·x ≤ F(x) ≤ c₃·x·(1−x)^(−1/2)`
//! * mean minimum distortion: `E[min sin²] ≤ 2^(1−B)`
//! * log distortion: `B + log₂c₃ ≤ E[−log₂ min sin²] ≤ B + log₂c₃ + log₂e`
//!
//! with `c₃ = 1/2`. They are asserted for uniformly distributed directions
//! and reported for the canonicalized-Gaussian law the simulator actually
//! uses for channels and codewords.

use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::csi::random_direction;
use crate::engine::mean_and_se;
use crate::numerics::{sin2_r3, to_r3, RVec3};
use crate::rng::{stream_rng, Domain};

/// Bit counts of the standard suite.
pub const SUITE_BITS: [u32; 5] = [2, 4, 6, 8, 10];
/// CDF evaluation grid `0.05, 0.10, …, 0.95`.
pub fn cdf_grid() -> Vec<f64> {
    (1..=19).map(|k| k as f64 * 0.05).collect()
}
/// Number of standard errors allowed on every empirical comparison.
pub const SIGMAS: f64 = 3.0;
/// Relative slack on the mean-distortion upper bound (it is tight at large B).
pub const DISTORTION_SLACK: f64 = 0.1;

const DIRECTIONS_PER_CODEBOOK: usize = 1000;

/// `c_{2n−1} = Γ(n−1/2) / (Γ(n)·Γ(1/2))`, evaluated as `C(2n−2, n−1) / 4^(n−1)`.
pub fn c_constant(n: u32) -> f64 {
    assert!(n >= 2, "c_constant needs n >= 2");
    let m = n - 1;
    // C(2m, m)/4^m = Π_{k=1..m} (2k−1)/(2k)
    (1..=m)
        .map(|k| (2 * k - 1) as f64 / (2 * k) as f64)
        .product()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionLaw {
    /// Uniform on the unit sphere of `R^3`.
    UniformSphere,
    /// `R^3` image of a normalized, phase-canonicalized CN(0, I₂) vector.
    CanonicalGaussian,
}

impl DirectionLaw {
    pub fn as_str(&self) -> &'static str {
        match self {
            DirectionLaw::UniformSphere => "uniform_sphere",
            DirectionLaw::CanonicalGaussian => "canonical_gaussian",
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> RVec3 {
        match self {
            DirectionLaw::UniformSphere => loop {
                let v = RVec3([
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                ]);
                if let Ok(u) = v.normalized() {
                    return u;
                }
            },
            DirectionLaw::CanonicalGaussian => {
                to_r3(&random_direction(rng)).expect("canonical by construction")
            }
        }
    }
}

impl fmt::Display for DirectionLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdfPoint {
    pub x: f64,
    pub empirical: f64,
    pub std_err: f64,
    pub lower: f64,
    pub upper: f64,
    /// `1 − √(1−x)`, the exact CDF under the uniform law.
    pub uniform_exact: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdfReport {
    pub law: DirectionLaw,
    pub samples: usize,
    pub points: Vec<CdfPoint>,
}

impl CdfReport {
    pub fn pass(&self) -> bool {
        self.points.iter().all(|p| p.pass)
    }
}

/// Empirical CDF of `sin²` between a direction and one independent codeword,
/// compared with the single-codeword bounds on [`cdf_grid`].
pub fn check_cdf_bounds(law: DirectionLaw, samples: usize, seed: u64) -> CdfReport {
    let chunks = samples.div_ceil(DIRECTIONS_PER_CODEBOOK);
    let d2: Vec<f64> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = stream_rng(seed, Domain::Bounds, b as u64);
            let n = DIRECTIONS_PER_CODEBOOK.min(samples - b * DIRECTIONS_PER_CODEBOOK);
            (0..n)
                .map(|_| {
                    let h = law.draw(&mut rng);
                    let c = law.draw(&mut rng);
                    sin2_r3(&h, &c)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let c3 = c_constant(2);
    let nf = d2.len() as f64;
    let points = cdf_grid()
        .into_iter()
        .map(|x| {
            let f = d2.iter().filter(|&&d| d <= x).count() as f64 / nf;
            let se = (f * (1.0 - f) / nf).sqrt().max(1.0 / nf);
            let lower = c3 * x;
            let upper = c3 * x / (1.0 - x).sqrt();
            CdfPoint {
                x,
                empirical: f,
                std_err: se,
                lower,
                upper,
                uniform_exact: 1.0 - (1.0 - x).sqrt(),
                pass: f >= lower - SIGMAS * se && f <= upper + SIGMAS * se,
            }
        })
        .collect();
    CdfReport {
        law,
        samples: d2.len(),
        points,
    }
}

/// Minimum distortion samples `min_c sin²(h, c)` over random codebooks of
/// `2^bits` codewords; each codebook serves up to 1000 directions.
pub fn sample_min_distortion(law: DirectionLaw, bits: u32, samples: usize, seed: u64) -> Vec<f64> {
    let k = 1usize << bits;
    let chunks = samples.div_ceil(DIRECTIONS_PER_CODEBOOK);
    // streams 0.. are used by the CDF check; keep these disjoint
    let offset = 1u64 << 40;
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = stream_rng(
                seed,
                Domain::Bounds,
                offset + ((bits as u64) << 32) + b as u64,
            );
            let book: Vec<RVec3> = (0..k).map(|_| law.draw(&mut rng)).collect();
            let n = DIRECTIONS_PER_CODEBOOK.min(samples - b * DIRECTIONS_PER_CODEBOOK);
            (0..n)
                .map(|_| {
                    let h = law.draw(&mut rng);
                    let mut best = 0usize;
                    let mut best_dot = -1.0;
                    for (idx, c) in book.iter().enumerate() {
                        let d = c.dot(&h).abs();
                        if d > best_dot {
                            best_dot = d;
                            best = idx;
                        }
                    }
                    sin2_r3(&book[best], &h)
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// One empirical-vs-analytic comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub empirical: f64,
    pub std_err: f64,
    /// Exact value under the uniform law, where known in closed form.
    pub oracle: Option<f64>,
    pub lower: f64,
    pub upper: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub law: DirectionLaw,
    pub bits: u32,
    pub samples: usize,
    /// `E[min sin²]` against `2^(1−B)` (and `2/(2^B + 2)` under the uniform law).
    pub distortion: Option<BoundCheck>,
    /// `E[−log₂ min sin²]` against `[B − 1, B − 1 + log₂e]`.
    pub log_distortion: Option<BoundCheck>,
}

impl BoundReport {
    pub fn pass(&self) -> bool {
        self.distortion
            .iter()
            .chain(&self.log_distortion)
            .all(|c| c.pass)
    }
}

/// Mean and standard error from per-codebook batch means, since directions
/// quantized against the same codebook are not independent.
fn batch_mean_and_se(xs: &[f64]) -> (f64, f64) {
    let means: Vec<f64> = xs
        .chunks(DIRECTIONS_PER_CODEBOOK)
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect();
    if means.len() < 2 {
        return mean_and_se(xs);
    }
    (mean_and_se(xs).0, mean_and_se(&means).1)
}

fn distortion_check(law: DirectionLaw, bits: u32, d: &[f64]) -> BoundCheck {
    let (mean, se) = batch_mean_and_se(d);
    let k = (1u64 << bits) as f64;
    let upper = c_constant(2).recip() * (-(bits as f64)).exp2();
    let oracle = (law == DirectionLaw::UniformSphere).then(|| 2.0 / (k + 2.0));
    let within_oracle = oracle.is_none_or(|o| (mean - o).abs() <= SIGMAS * se);
    BoundCheck {
        empirical: mean,
        std_err: se,
        oracle,
        lower: 0.0,
        upper,
        pass: within_oracle && mean <= upper * (1.0 + DISTORTION_SLACK),
    }
}

fn log_distortion_check(bits: u32, d: &[f64]) -> BoundCheck {
    let logs: Vec<f64> = d.iter().map(|x| -x.log2()).collect();
    let (mean, se) = batch_mean_and_se(&logs);
    let lower = bits as f64 + c_constant(2).log2();
    let upper = lower + std::f64::consts::LOG2_E;
    BoundCheck {
        empirical: mean,
        std_err: se,
        oracle: None,
        lower,
        upper,
        pass: mean >= lower - SIGMAS * se && mean <= upper + SIGMAS * se,
    }
}

pub fn check_distortion_bound(
    law: DirectionLaw,
    bits: u32,
    samples: usize,
    seed: u64,
) -> BoundReport {
    assert!(bits >= 1, "distortion bound needs B >= 1");
    let d = sample_min_distortion(law, bits, samples, seed);
    BoundReport {
        law,
        bits,
        samples: d.len(),
        distortion: Some(distortion_check(law, bits, &d)),
        log_distortion: None,
    }
}

pub fn check_log_distortion_bounds(
    law: DirectionLaw,
    bits: u32,
    samples: usize,
    seed: u64,
) -> BoundReport {
    assert!(bits >= 2, "log-distortion bounds need B >= 2");
    let d = sample_min_distortion(law, bits, samples, seed);
    BoundReport {
        law,
        bits,
        samples: d.len(),
        distortion: None,
        log_distortion: Some(log_distortion_check(bits, &d)),
    }
}

/// Both mean-distortion checks from one set of samples.
pub fn check_bounds(law: DirectionLaw, bits: u32, samples: usize, seed: u64) -> BoundReport {
    let d = sample_min_distortion(law, bits, samples, seed);
    BoundReport {
        law,
        bits,
        samples: d.len(),
        distortion: (bits >= 1).then(|| distortion_check(law, bits, &d)),
        log_distortion: (bits >= 2).then(|| log_distortion_check(bits, &d)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsSuite {
    pub cdf: Vec<CdfReport>,
    pub reports: Vec<BoundReport>,
}

/// CDF check plus [`check_bounds`] for every B in [`SUITE_BITS`], under both laws.
pub fn run_bounds_suite(samples: usize, seed: u64) -> BoundsSuite {
    let laws = [DirectionLaw::UniformSphere, DirectionLaw::CanonicalGaussian];
    BoundsSuite {
        cdf: laws
            .iter()
            .map(|&l| check_cdf_bounds(l, samples, seed))
            .collect(),
        reports: laws
            .iter()
            .flat_map(|&l| {
                SUITE_BITS
                    .iter()
                    .map(move |&b| check_bounds(l, b, samples, seed))
            })
            .collect(),
    }
}
