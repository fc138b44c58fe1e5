//! Two-element complex vectors and their three-real-dimensional image.
//!
//! Channel directions, estimates and beamformers all live in `C^2`. To compare
//! estimates held at different transmitters the common phase ambiguity is
//! removed by rotating each vector until its first entry is real and
//! non-negative; the remaining three real coordinates form the `R^3`
//! representation used for quantization and distortion measurements.

use std::ops::{Add, Index, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance on unit-scale quantities.
pub const TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CVec2(pub [Complex64; 2]);

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RVec3(pub [f64; 3]);

impl CVec2 {
    pub const fn new(a: Complex64, b: Complex64) -> Self {
        CVec2([a, b])
    }

    pub fn from_real(a: f64, b: f64) -> Self {
        CVec2([Complex64::new(a, 0.0), Complex64::new(b, 0.0)])
    }

    /// Hermitian inner product `selfᴴ · other`.
    pub fn inner(&self, other: &CVec2) -> Complex64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.0[0].norm().hypot(self.0[1].norm())
    }

    pub fn scale(&self, s: f64) -> CVec2 {
        CVec2([self.0[0] * s, self.0[1] * s])
    }

    pub fn rotate(&self, phase: Complex64) -> CVec2 {
        CVec2([self.0[0] * phase, self.0[1] * phase])
    }

    pub fn normalized(&self) -> Result<CVec2> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(self.scale(1.0 / n))
    }

    pub fn is_unit(&self) -> bool {
        (self.norm() - 1.0).abs() <= TOL
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<usize> for CVec2 {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl Add for CVec2 {
    type Output = CVec2;
    fn add(self, rhs: CVec2) -> CVec2 {
        CVec2([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1]])
    }
}

impl Sub for CVec2 {
    type Output = CVec2;
    fn sub(self, rhs: CVec2) -> CVec2 {
        CVec2([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1]])
    }
}

impl Mul<Complex64> for CVec2 {
    type Output = CVec2;
    fn mul(self, rhs: Complex64) -> CVec2 {
        self.rotate(rhs)
    }
}

impl RVec3 {
    pub fn dot(&self, other: &RVec3) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn cross(&self, other: &RVec3) -> RVec3 {
        let [a0, a1, a2] = self.0;
        let [b0, b1, b2] = other.0;
        RVec3([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<RVec3> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(RVec3([self.0[0] / n, self.0[1] / n, self.0[2] / n]))
    }
}

/// `Π⊥_u(v) = v − (uᴴv)·u` for a unit vector `u`.
pub fn project_orth(u: &CVec2, v: &CVec2) -> Result<CVec2> {
    if !u.is_unit() {
        return Err(Error::Contract(format!(
            "projector direction must be unit norm, got ‖u‖ = {}",
            u.norm()
        )));
    }
    Ok(*v - u.rotate(u.inner(v)))
}

/// Rotates `u` so that its first entry is real and non-negative.
///
/// When the first entry is (numerically) zero the second entry is made real
/// and non-negative instead. The zero vector is returned unchanged.
pub fn canonicalize_phase(u: &CVec2) -> CVec2 {
    let [a, b] = u.0;
    if a.norm() >= TOL {
        let mag = a.norm();
        let phase = a.conj() / mag;
        CVec2([Complex64::new(mag, 0.0), b * phase])
    } else if b.norm() > 0.0 {
        let mag = b.norm();
        let phase = b.conj() / mag;
        CVec2([a * phase, Complex64::new(mag, 0.0)])
    } else {
        *u
    }
}

/// Stacks `(Re u₁, Re u₂, Im u₂)` for a phase-canonical `u`.
pub fn to_r3(u: &CVec2) -> Result<RVec3> {
    if u.0[0].im.abs() > TOL {
        return Err(Error::Contract(format!(
            "to_r3 needs a real first entry, got imaginary part {}",
            u.0[0].im
        )));
    }
    Ok(RVec3([u.0[0].re, u.0[1].re, u.0[1].im]))
}

/// Unsigned angle `arccos(|aᵀb| / (‖a‖‖b‖))`, in `[0, π/2]`.
pub fn angle_r3(a: &RVec3, b: &RVec3) -> Result<f64> {
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    let c = (a.dot(b).abs() / (na * nb)).min(1.0);
    Ok(c.acos())
}

/// `sin²` of the `R^3` angle between `a` and `b`, computed through the cross
/// product so it stays accurate for nearly parallel vectors.
pub fn sin2_r3(a: &RVec3, b: &RVec3) -> f64 {
    let denom = a.norm_sqr() * b.norm_sqr();
    if denom == 0.0 {
        return 1.0;
    }
    (a.cross(b).norm_sqr() / denom).min(1.0)
}
