//! Free Gaussian wave packet of the centre of mass.
//!
//! Atomic units throughout: lengths in `a_B`, momenta in `ħ/a_B`, the mass in
//! electron masses and time in `ħ/E_h`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{dot3, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    /// Initial position spread δ.
    pub delta: f64,
    /// Initial centre.
    pub r0: Vec3,
    /// Mean momentum.
    pub p0: Vec3,
    /// Total mass.
    pub mass: f64,
}

impl GaussianPacket {
    pub fn new(delta: f64, r0: Vec3, p0: Vec3, mass: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::domain("packet width delta", "positive", delta));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::domain("packet mass", "positive", mass));
        }
        Ok(Self {
            delta,
            r0,
            p0,
            mass,
        })
    }

    /// Packet at rest at the origin.
    pub fn at_rest(delta: f64, mass: f64) -> Result<Self> {
        Self::new(delta, [0.0; 3], [0.0; 3], mass)
    }

    /// Dimensionless spreading parameter `ħt/(2Mδ²)`.
    pub fn spreading(&self, t: f64) -> f64 {
        t / (2.0 * self.mass * self.delta * self.delta)
    }

    /// Time at which [`spreading`](Self::spreading) equals `theta`.
    pub fn time_for_spreading(&self, theta: f64) -> f64 {
        theta * 2.0 * self.mass * self.delta * self.delta
    }

    /// Wave function ψ(R, t).
    pub fn evaluate(&self, r: Vec3, t: f64) -> Complex64 {
        (0..3).map(|axis| self.evaluate_axis(axis, r[axis], t)).product()
    }

    /// One Cartesian factor of ψ; the packet is a product of three of these.
    pub fn evaluate_axis(&self, axis: usize, x: f64, t: f64) -> Complex64 {
        let d2 = self.delta * self.delta;
        let spread = Complex64::new(1.0, self.spreading(t));
        let p = self.p0[axis];
        let centre = self.r0[axis] + p / self.mass * t;
        let u = x - centre;
        let phase = Complex64::new(0.0, -p * p * t / (2.0 * self.mass) + p * (x - self.r0[axis]));
        let gauss = -Complex64::new(u * u, 0.0) / (4.0 * d2 * spread);
        let norm = (2.0 * std::f64::consts::PI * d2).powf(-0.25);
        norm * spread.powf(-0.5) * (gauss + phase).exp()
    }

    /// `|ψ|²`.
    pub fn density(&self, r: Vec3, t: f64) -> f64 {
        self.evaluate(r, t).norm_sqr()
    }

    /// Peak value of `|ψ(·, t)|²`, attained at the moving centre.
    pub fn peak_density(&self, t: f64) -> f64 {
        let theta = self.spreading(t);
        let d2 = self.delta * self.delta;
        (2.0 * std::f64::consts::PI * d2).powf(-1.5) / (1.0 + theta * theta).powf(1.5)
    }

    /// Centre of `|ψ|²` at time `t`.
    pub fn centre(&self, t: f64) -> Vec3 {
        let mut c = self.r0;
        for (ci, pi) in c.iter_mut().zip(self.p0) {
            *ci += pi / self.mass * t;
        }
        c
    }

    /// Position spread `Δx = √(δ² + (ħt/(2Mδ))²)`.
    pub fn width(&self, t: f64) -> f64 {
        let s = t / (2.0 * self.mass * self.delta);
        self.delta.hypot(s)
    }

    /// `z = a_B/Δx(t)`.
    pub fn z_parameter(&self, t: f64) -> f64 {
        1.0 / self.width(t)
    }

    /// `z₀ = a_B/δ`.
    pub fn z0_parameter(&self) -> f64 {
        1.0 / self.delta
    }

    /// Centre-of-mass velocity spread `ħ/(2Mδ)` in atomic velocity units.
    pub fn velocity_spread(&self) -> f64 {
        1.0 / (2.0 * self.mass * self.delta)
    }

    /// Plane wave times a static Gaussian: ψ at `t = 0` written independently
    /// of [`evaluate`](Self::evaluate).
    pub fn initial_profile(&self, r: Vec3) -> Complex64 {
        let d = crate::sub3(r, self.r0);
        let norm = (2.0 * std::f64::consts::PI * self.delta * self.delta).powf(-0.75);
        let envelope = norm * (-dot3(d, d) / (4.0 * self.delta * self.delta)).exp();
        Complex64::from_polar(envelope, dot3(self.p0, d))
    }
}
