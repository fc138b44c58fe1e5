//! i.i.d. Rayleigh channel realizations.

use rand::Rng;

use crate::numerics::{canonicalize_phase, CVec2};
use crate::rng::complex_normal_vec;

/// True channel towards both receivers.
///
/// `h[i]` is stored as a column vector so that receiver `i` observes
/// `h[i]ᴴ x`. `dir[i]` is the unit-norm, phase-canonical direction of `h[i]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelPair {
    pub h: [CVec2; 2],
    pub norm: [f64; 2],
    pub dir: [CVec2; 2],
}

impl ChannelPair {
    /// Builds the pair from two nonzero channel vectors. Returns `None` when
    /// either vector is zero.
    pub fn from_vectors(h1: CVec2, h2: CVec2) -> Option<Self> {
        let n1 = h1.norm();
        let n2 = h2.norm();
        if n1 == 0.0 || n2 == 0.0 {
            return None;
        }
        Some(ChannelPair {
            h: [h1, h2],
            norm: [n1, n2],
            dir: [
                canonicalize_phase(&h1.scale(1.0 / n1)),
                canonicalize_phase(&h2.scale(1.0 / n2)),
            ],
        })
    }
}

/// Draws the four channel coefficients i.i.d. CN(0, 1).
pub fn draw_channel<R: Rng + ?Sized>(rng: &mut R) -> ChannelPair {
    loop {
        let h1 = complex_normal_vec(rng);
        let h2 = complex_normal_vec(rng);
        if let Some(ch) = ChannelPair::from_vectors(h1, h2) {
            return ch;
        }
    }
}
