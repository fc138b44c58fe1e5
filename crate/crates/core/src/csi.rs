//! Distributed channel estimates.
//!
//! Each transmitter `j` holds its own estimate `est[i][j]` of the normalized
//! channel direction towards receiver `i`. Two error models produce them:
//! random vector quantization (RVQ) against a random codebook, and a
//! statistical model that adds complex Gaussian noise to the direction.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;

use crate::channel::ChannelPair;
use crate::error::{Error, Result};
use crate::numerics::{canonicalize_phase, to_r3, CVec2, RVec3, TOL};
use crate::rng::complex_normal_vec;

/// Largest codebook the simulator will search exhaustively.
pub const MAX_BITS: u32 = 24;

/// Per-cell CSI quality, indexed `[rx][tx]` (0-based).
#[derive(Debug, Clone, PartialEq)]
pub enum CsiQuality {
    /// Bits scale as `alpha · log₂P`, `alpha ∈ [0, 1]`.
    Alpha([[f64; 2]; 2]),
    /// Fixed number of feedback bits per cell.
    Bits([[u32; 2]; 2]),
    /// Every transmitter knows the true directions.
    Perfect,
}

impl CsiQuality {
    pub fn validate(&self) -> Result<()> {
        match self {
            CsiQuality::Alpha(a) => {
                for (i, row) in a.iter().enumerate() {
                    for (j, &v) in row.iter().enumerate() {
                        if !(0.0..=1.0).contains(&v) {
                            return Err(Error::InvalidConfig(format!(
                                "alpha[{i}][{j}] = {v} is outside [0, 1]"
                            )));
                        }
                    }
                }
            }
            CsiQuality::Bits(b) => {
                for (i, row) in b.iter().enumerate() {
                    for (j, &v) in row.iter().enumerate() {
                        if v > MAX_BITS {
                            return Err(Error::InvalidConfig(format!(
                                "bits[{i}][{j}] = {v} exceeds the cap of {MAX_BITS}"
                            )));
                        }
                    }
                }
            }
            CsiQuality::Perfect => {}
        }
        Ok(())
    }

    /// Ordering key used to pick the better-informed transmitter.
    pub fn score(&self, rx: usize, tx: usize) -> f64 {
        match self {
            CsiQuality::Alpha(a) => a[rx][tx],
            CsiQuality::Bits(b) => b[rx][tx] as f64,
            CsiQuality::Perfect => 0.0,
        }
    }

    /// Noise variance of the statistical model at linear SNR `p`:
    /// `p^-alpha`, or `2^-B` for a fixed bit count.
    pub fn noise_variance(&self, rx: usize, tx: usize, p: f64) -> f64 {
        match self {
            CsiQuality::Alpha(a) => p.powf(-a[rx][tx]),
            CsiQuality::Bits(b) => (-(b[rx][tx] as f64)).exp2(),
            CsiQuality::Perfect => 0.0,
        }
    }

    /// Codebook size in bits at linear SNR `p`; `None` for perfect CSI.
    pub fn bits_at(&self, rx: usize, tx: usize, p: f64) -> Option<u32> {
        match self {
            CsiQuality::Alpha(a) => Some(bits_from_alpha(a[rx][tx], p)),
            CsiQuality::Bits(b) => Some(b[rx][tx]),
            CsiQuality::Perfect => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CsiModel {
    Statistical,
    Rvq,
}

impl CsiModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CsiModel::Statistical => "statistical",
            CsiModel::Rvq => "rvq",
        }
    }
}

impl fmt::Display for CsiModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CsiModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "statistical" => Ok(CsiModel::Statistical),
            "rvq" => Ok(CsiModel::Rvq),
            other => Err(Error::InvalidConfig(format!(
                "unknown CSI model `{other}` (expected `statistical` or `rvq`)"
            ))),
        }
    }
}

/// `⌊alpha · log₂p⌋` clamped to `[0, MAX_BITS]`.
pub fn bits_from_alpha(alpha: f64, p: f64) -> u32 {
    let b = (alpha * p.log2()).floor();
    if b.is_nan() || b <= 0.0 {
        0
    } else {
        b.min(MAX_BITS as f64) as u32
    }
}

/// Random codebook of unit, phase-canonical codewords.
///
/// Only the `R^3` images are stored; since codewords are canonical the
/// complex vector is recovered exactly by [`Codebook::word`].
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    r3: Vec<RVec3>,
}

impl Codebook {
    /// Wraps explicit codewords. Each must be unit-norm and canonical.
    pub fn from_words(words: &[CVec2]) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::EmptyCodebook);
        }
        let r3 = words
            .iter()
            .map(|w| {
                if !w.is_unit() {
                    return Err(Error::Contract("codeword is not unit norm".into()));
                }
                if w[0].re < 0.0 {
                    return Err(Error::Contract("codeword is not phase canonical".into()));
                }
                to_r3(w)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Codebook { r3 })
    }

    pub fn len(&self) -> usize {
        self.r3.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r3.is_empty()
    }

    pub fn r3(&self) -> &[RVec3] {
        &self.r3
    }

    pub fn word(&self, k: usize) -> CVec2 {
        from_r3(&self.r3[k])
    }
}

fn from_r3(r: &RVec3) -> CVec2 {
    CVec2::new(
        num_complex::Complex64::new(r.0[0], 0.0),
        num_complex::Complex64::new(r.0[1], r.0[2]),
    )
}

/// Draws a direction with the same law as the channel directions:
/// normalized, phase-canonicalized CN(0, I₂).
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> CVec2 {
    loop {
        if let Ok(u) = complex_normal_vec(rng).normalized() {
            return canonicalize_phase(&u);
        }
    }
}

pub fn gen_codebook<R: Rng + ?Sized>(bits: u32, rng: &mut R) -> Result<Codebook> {
    if bits > MAX_BITS {
        return Err(Error::BitsOutOfRange(bits));
    }
    let size = 1usize << bits;
    let mut r3 = Vec::with_capacity(size);
    for _ in 0..size {
        let w = random_direction(rng);
        r3.push(RVec3([w[0].re, w[1].re, w[1].im]));
    }
    Ok(Codebook { r3 })
}

/// Index of the codeword maximizing `|cᵀd|` in `R^3`; ties go to the lowest index.
pub fn quantize_index(dir: &RVec3, words: &[RVec3]) -> Result<usize> {
    let mut best = None;
    let mut best_score = f64::NEG_INFINITY;
    for (k, c) in words.iter().enumerate() {
        let s = c.dot(dir).abs();
        if s > best_score {
            best_score = s;
            best = Some(k);
        }
    }
    best.ok_or(Error::EmptyCodebook)
}

pub fn quantize(dir: &CVec2, cb: &Codebook) -> Result<CVec2> {
    let d = to_r3(dir)?;
    let k = quantize_index(&d, cb.r3())?;
    Ok(cb.word(k))
}

/// Adds CN(0, variance·I₂) noise to `dir`, then re-normalizes and
/// re-canonicalizes. The noise is always drawn so the stream position does
/// not depend on `variance`; zero variance returns `dir` unchanged.
pub fn perturb_direction<R: Rng + ?Sized>(dir: &CVec2, variance: f64, rng: &mut R) -> CVec2 {
    let e = complex_normal_vec(rng);
    if variance <= 0.0 {
        return *dir;
    }
    match (*dir + e.scale(variance.sqrt())).normalized() {
        Ok(u) => canonicalize_phase(&u),
        Err(_) => *dir,
    }
}

/// Statistical-model estimate with noise covariance `p^-alpha · I₂`.
pub fn statistical_estimate<R: Rng + ?Sized>(
    dir: &CVec2,
    alpha: f64,
    p: f64,
    rng: &mut R,
) -> CVec2 {
    perturb_direction(dir, p.powf(-alpha), rng)
}

/// The four estimates, indexed `[rx][tx]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateSet {
    pub est: [[CVec2; 2]; 2],
}

impl EstimateSet {
    /// Every transmitter holds the true directions.
    pub fn perfect(ch: &ChannelPair) -> Self {
        EstimateSet {
            est: [[ch.dir[0]; 2], [ch.dir[1]; 2]],
        }
    }

    /// Both transmitters hold the same estimates `dirs`.
    pub fn shared(dirs: [CVec2; 2]) -> Self {
        EstimateSet {
            est: [[dirs[0]; 2], [dirs[1]; 2]],
        }
    }

    pub fn get(&self, rx: usize, tx: usize) -> &CVec2 {
        &self.est[rx][tx]
    }
}

/// Quantizer for one `(rx, tx)` cell: a codebook and how many of its leading
/// codewords the transmitter may use.
#[derive(Debug, Clone)]
pub struct CellCodebook {
    pub book: Arc<Codebook>,
    pub active: usize,
}

impl CellCodebook {
    pub fn words(&self) -> &[RVec3] {
        &self.book.r3()[..self.active]
    }
}

/// The codebooks used by all four cells of one codebook realization.
#[derive(Debug, Clone)]
pub struct CodebookSet {
    pub cells: [[Option<CellCodebook>; 2]; 2],
}

impl CodebookSet {
    /// Draws codebooks for every cell at linear SNR `p`.
    ///
    /// With `shared` set, both transmitters quantize the channel of receiver
    /// `i` with one codebook drawn at the larger of their two sizes, each using
    /// its leading `2^B` entries. Otherwise every cell gets its own codebook.
    pub fn generate<R: Rng + ?Sized>(
        quality: &CsiQuality,
        p: f64,
        shared: bool,
        rng: &mut R,
    ) -> Result<Self> {
        let mut cells: [[Option<CellCodebook>; 2]; 2] = Default::default();
        for (rx, row) in cells.iter_mut().enumerate() {
            let bits = [quality.bits_at(rx, 0, p), quality.bits_at(rx, 1, p)];
            if shared {
                let Some(max_bits) = bits.iter().flatten().copied().max() else {
                    continue;
                };
                let book = Arc::new(gen_codebook(max_bits, rng)?);
                for (tx, cell) in row.iter_mut().enumerate() {
                    *cell = bits[tx].map(|b| CellCodebook {
                        book: Arc::clone(&book),
                        active: 1 << b,
                    });
                }
            } else {
                for (tx, cell) in row.iter_mut().enumerate() {
                    if let Some(b) = bits[tx] {
                        let book = Arc::new(gen_codebook(b, rng)?);
                        *cell = Some(CellCodebook {
                            active: book.len(),
                            book,
                        });
                    }
                }
            }
        }
        Ok(CodebookSet { cells })
    }
}

/// Where the estimates come from in [`build_estimates`].
#[derive(Debug, Clone, Copy)]
pub enum Estimator<'a> {
    Statistical,
    Rvq(&'a CodebookSet),
}

/// Produces the four distributed estimates for one channel realization.
///
/// Cells are processed in `(rx, tx)` row-major order. In statistical mode
/// each cell consumes one noise draw from `rng`; in RVQ mode `rng` is unused
/// and each cell quantizes against its own codebook.
pub fn build_estimates<R: Rng + ?Sized>(
    ch: &ChannelPair,
    quality: &CsiQuality,
    estimator: Estimator<'_>,
    p: f64,
    rng: &mut R,
) -> Result<EstimateSet> {
    let mut est = [[CVec2::default(); 2]; 2];
    for rx in 0..2 {
        for tx in 0..2 {
            let dir = &ch.dir[rx];
            est[rx][tx] = match estimator {
                Estimator::Statistical => {
                    perturb_direction(dir, quality.noise_variance(rx, tx, p), rng)
                }
                Estimator::Rvq(books) => match &books.cells[rx][tx] {
                    Some(cell) => {
                        let k = quantize_index(&to_r3(dir)?, cell.words())?;
                        cell.book.word(k)
                    }
                    None => *dir,
                },
            };
        }
    }
    Ok(EstimateSet { est })
}

/// Complex chordal distortion `1 − |aᴴb|²` between unit vectors.
pub fn chordal_distortion(a: &CVec2, b: &CVec2) -> f64 {
    (1.0 - a.inner(b).norm_sqr()).max(0.0)
}

/// True when `u` is unit norm with a real non-negative first entry.
pub fn is_canonical_unit(u: &CVec2) -> bool {
    u.is_unit() && u[0].im.abs() <= TOL && u[0].re >= 0.0
}
