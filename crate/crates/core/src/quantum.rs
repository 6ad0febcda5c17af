//! Two-qubit states measured along directions in a fixed plane.
//!
//! The observable at angle θ is `cos θ·Z + sin θ·X`; its `+1` eigenvector
//! is `(cos θ/2, sin θ/2)` and its `-1` eigenvector `(-sin θ/2, cos θ/2)` in
//! the basis where `Z = diag(1, -1)`. Basis order for the pair is
//! (++, +-, -+, --), Alice's qubit first.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::distribution::JointDistribution;
use crate::error::{Error, Result};
use crate::IDENTITY_TOL;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantumState {
    amp: [Complex64; 4],
}

impl QuantumState {
    /// Fails unless the squared norm is 1 within 1e-12.
    pub fn new(amp: [Complex64; 4]) -> Result<Self> {
        let n = norm_sqr(&amp);
        if !n.is_finite() || (n - 1.0).abs() > IDENTITY_TOL {
            return Err(Error::StateNotNormalized(n));
        }
        Ok(QuantumState { amp })
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalized(amp: [Complex64; 4]) -> Result<Self> {
        let n = norm_sqr(&amp);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::StateNotNormalized(n));
        }
        let s = n.sqrt();
        Ok(QuantumState {
            amp: amp.map(|a| a / s),
        })
    }

    /// Four standard-normal complex amplitudes, normalized.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let amp: [Complex64; 4] = std::array::from_fn(|_| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            if let Ok(s) = Self::normalized(amp) {
                return s;
            }
        }
    }

    /// Computational basis state `index` (0 = ++, 3 = --).
    pub fn basis(index: usize) -> Self {
        let mut amp = [Complex64::new(0.0, 0.0); 4];
        amp[index] = Complex64::new(1.0, 0.0);
        QuantumState { amp }
    }

    /// From 8 reals, real and imaginary parts interleaved.
    pub fn from_interleaved(v: &[f64]) -> Result<Self> {
        if v.len() != 8 {
            return Err(Error::Parse(format!(
                "a state needs 8 numbers, got {}",
                v.len()
            )));
        }
        let amp = std::array::from_fn(|k| Complex64::new(v[2 * k], v[2 * k + 1]));
        Self::new(amp)
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amp
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amp)
    }
}

fn norm_sqr(amp: &[Complex64; 4]) -> f64 {
    amp.iter().map(|a| a.norm_sqr()).sum()
}

/// `(|++> + |-->) / √2`.
pub fn bell_state() -> QuantumState {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    QuantumState { amp: [h, z, z, h] }
}

/// Direction angles for D1, D2 (Alice) and D1', D2' (Bob), in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSettings {
    pub theta_d1: f64,
    pub theta_d2: f64,
    pub theta_d1p: f64,
    pub theta_d2p: f64,
}

impl MeasurementSettings {
    /// Angles are reduced into [0, 2π).
    pub fn new(theta_d1: f64, theta_d2: f64, theta_d1p: f64, theta_d2p: f64) -> Result<Self> {
        Self::from_array([theta_d1, theta_d2, theta_d1p, theta_d2p])
    }

    pub fn from_array(angles: [f64; 4]) -> Result<Self> {
        if let Some(a) = angles.iter().find(|a| !a.is_finite()) {
            return Err(Error::InvalidSettings(format!("non-finite angle {a}")));
        }
        let [theta_d1, theta_d2, theta_d1p, theta_d2p] = angles.map(reduce_angle);
        Ok(MeasurementSettings {
            theta_d1,
            theta_d2,
            theta_d1p,
            theta_d2p,
        })
    }

    pub fn from_degrees(deg: [f64; 4]) -> Result<Self> {
        Self::from_array(deg.map(f64::to_radians))
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.theta_d1, self.theta_d2, self.theta_d1p, self.theta_d2p]
    }

    pub fn alice(&self) -> [f64; 2] {
        [self.theta_d1, self.theta_d2]
    }

    pub fn bob(&self) -> [f64; 2] {
        [self.theta_d1p, self.theta_d2p]
    }

    /// The textbook CHSH-optimal settings (0, π/2, π/4, -π/4).
    pub fn canonical_chsh() -> Self {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        Self::new(0.0, FRAC_PI_2, FRAC_PI_4, -FRAC_PI_4).expect("finite angles")
    }

    /// All four angles shifted by `phi`.
    pub fn rotated(&self, phi: f64) -> Result<Self> {
        Self::from_array(self.to_array().map(|a| a + phi))
    }

    /// True if `other` equals `self` rotated by a common offset, up to `tol`
    /// per angle (modulo 2π).
    pub fn gauge_equivalent(&self, other: &Self, tol: f64) -> bool {
        let a = self.to_array();
        let b = other.to_array();
        let phi = b[0] - a[0];
        (0..4).all(|k| angle_distance(a[k] + phi, b[k]) <= tol)
    }
}

pub fn reduce_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs.
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Distance on the circle.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Eigenvectors `[plus, minus]` of the planar observable at `theta`.
fn eigenbasis(theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [[c, s], [-s, c]]
}

/// Outcome probabilities (++, +-, -+, --) for one pair of angles.
fn pair_probabilities(psi: &QuantumState, theta_a: f64, theta_b: f64) -> [f64; 4] {
    let ua = eigenbasis(theta_a);
    let ub = eigenbasis(theta_b);
    let amp = psi.amplitudes();
    std::array::from_fn(|k| {
        let (x, y) = (k >> 1, k & 1);
        let mut overlap = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                overlap += amp[2 * i + j] * (ua[x][i] * ub[y][j]);
            }
        }
        clamp_probability(overlap.norm_sqr())
    })
}

fn clamp_probability(p: f64) -> f64 {
    if p < 0.0 && p > -IDENTITY_TOL {
        0.0
    } else if p > 1.0 && p < 1.0 + IDENTITY_TOL {
        1.0
    } else {
        p
    }
}

fn ensure_normalized(psi: &QuantumState) -> Result<()> {
    let n = psi.norm_sqr();
    if (n - 1.0).abs() > IDENTITY_TOL {
        return Err(Error::StateNotNormalized(n));
    }
    Ok(())
}

/// Expected product of the two ±1 outcomes.
pub fn correlation(psi: &QuantumState, theta_a: f64, theta_b: f64) -> Result<f64> {
    ensure_normalized(psi)?;
    let [pp, pm, mp, mm] = pair_probabilities(psi, theta_a, theta_b);
    Ok((pp - pm - mp + mm).clamp(-1.0, 1.0))
}

/// The 16-entry table produced by measuring `psi` at every setting pair.
pub fn epr_distribution(psi: &QuantumState, m: &MeasurementSettings) -> Result<JointDistribution> {
    ensure_normalized(psi)?;
    let mut eps = [0.0; 16];
    for (i, &ta) in m.alice().iter().enumerate() {
        for (j, &tb) in m.bob().iter().enumerate() {
            let block = 2 * i + j;
            eps[4 * block..4 * block + 4].copy_from_slice(&pair_probabilities(psi, ta, tb));
        }
    }
    JointDistribution::new(eps)
}
