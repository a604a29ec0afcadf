//! Momentum distribution of the nucleus: the diagonal of the reduced density
//! matrix in momentum representation.
//!
//! Densities are in units of `a_B³/ħ³` and momentum offsets in `ħ/a_B`, so that
//! `4π ∫ q² ρ(q) dq = 1`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{CoherenceKernel, Species};
use crate::error::{Error, Result};
use crate::quadrature::{
    integrate_semi_infinite, try_integrate_fourier_sine, try_integrate_semi_infinite,
    try_integrate_with_breakpoints, QuadratureError, QuadratureResult, QuadratureSpec,
};
use crate::wavepacket::GaussianPacket;
use crate::{norm3, sub3, Vec3};

/// Below this `q` the `sin(qs)/q → s` limit is used.
const SMALL_Q: f64 = 1e-6;

/// Radial Fourier transform of `D(s)·exp(−s²z₀²/8)` for one kernel and width
/// ratio, with the tolerance scale fixed once.
#[derive(Debug, Clone, Copy)]
pub struct MomentumProfile {
    kernel: CoherenceKernel,
    z0: f64,
    spec: QuadratureSpec,
}

impl MomentumProfile {
    pub fn new(kernel: CoherenceKernel, z0: f64) -> Result<Self> {
        if !(z0 >= 0.0 && z0.is_finite()) {
            return Err(Error::domain("z0", "non-negative", z0));
        }
        if z0 == 0.0 && kernel.species == Species::Bare {
            return Err(Error::Singular(
                "bare kernel with z0 = 0 has no normalizable momentum density".into(),
            ));
        }
        let gaussian_scale = if z0 > 0.0 { 3.0 / z0 } else { f64::INFINITY };
        let decay = (1.25 * kernel.decay_length()).min(gaussian_scale);
        let base = QuadratureSpec::default().with_decay_scale(decay);
        let mut profile = Self {
            kernel,
            z0,
            spec: base,
        };
        // Absolute tolerance pinned to the size of the non-oscillatory envelope
        // integral, which bounds the roundoff floor of the oscillatory sum.
        let mass = integrate_semi_infinite(|s| profile.envelope(s), &base)?.value;
        profile.spec = base.with_tolerances(1e-10, 1e-12 * mass);
        Ok(profile)
    }

    pub fn kernel(&self) -> &CoherenceKernel {
        &self.kernel
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    /// `s·D(s)·exp(−s²z₀²/8)`.
    fn envelope(&self, s: f64) -> f64 {
        s * self.kernel.profile(s) * (-s * s * self.z0 * self.z0 / 8.0).exp()
    }

    fn decay_scale(&self) -> f64 {
        self.spec.decay_scale
    }

    /// `ρ(q) = (1/(2π²q)) ∫₀^∞ s sin(qs) D(s) exp(−s²z₀²/8) ds`.
    pub fn density(&self, q: f64) -> Result<f64> {
        if !(q >= 0.0 && q.is_finite()) {
            return Err(Error::domain("q", "non-negative", q));
        }
        let r = if q < SMALL_Q {
            try_integrate_semi_infinite(|s| Ok(s * self.envelope(s)), &[], &self.spec)?
        } else {
            let r = try_integrate_fourier_sine(|s| Ok(self.envelope(s)), q, &self.spec)?;
            QuadratureResult {
                value: r.value / q,
                error_estimate: r.error_estimate / q,
                ..r
            }
        };
        if !r.converged {
            return Err(Error::NotConverged {
                context: format!("momentum density at q = {q}, z0 = {}", self.z0),
                value: r.value,
                error_estimate: r.error_estimate,
            });
        }
        Ok(r.value / (2.0 * PI * PI))
    }

    /// Momentum beyond which the density is negligible for normalization.
    fn q_cutoff(&self) -> f64 {
        60.0 / (1.25 * self.kernel.decay_length()).min(1.0) + 6.0 * self.z0
    }

    /// `4π ∫₀^Q q² ρ(q) dq`, with `Q` past the point where `ρ` is negligible.
    pub fn normalization(&self) -> Result<f64> {
        let cut = self.q_cutoff();
        let mut points = vec![0.0];
        let mut p = 0.5 / self.decay_scale().max(1e-3);
        while p < cut {
            points.push(p);
            p *= 2.0;
        }
        points.push(cut);
        let outer = QuadratureSpec::default().with_tolerances(1e-9, 1e-13);
        let r = try_integrate_with_breakpoints(
            |q| {
                self.density(q)
                    .map(|d| 4.0 * PI * q * q * d)
                    .map_err(|e| nested(q, e))
            },
            &points,
            &outer,
        )?;
        converged(r, "momentum normalization")
    }

    /// Full width at half maximum of `ρ(q)`, in `ħ/a_B`.
    pub fn half_max_width(&self) -> Result<f64> {
        let peak = self.density(0.0)?;
        let mut hi = 1.0;
        while self.density(hi)? > 0.5 * peak {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.density(mid)? > 0.5 * peak {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-10 * hi {
                break;
            }
        }
        Ok(lo + hi)
    }
}

fn nested(x: f64, e: Error) -> QuadratureError {
    match e {
        Error::Quadrature(q) => q,
        other => QuadratureError::Nested {
            x,
            message: other.to_string(),
        },
    }
}

fn converged(r: QuadratureResult, context: &str) -> Result<f64> {
    if r.converged {
        Ok(r.value)
    } else {
        Err(Error::NotConverged {
            context: context.to_string(),
            value: r.value,
            error_estimate: r.error_estimate,
        })
    }
}

/// Hydrogen momentum density at offset `q` for width ratio `z₀ = a_B/δ`.
pub fn momentum_density(q: f64, z0: f64) -> Result<f64> {
    MomentumProfile::new(CoherenceKernel::hydrogen(), z0)?.density(q)
}

/// Pure-packet limit `(2/π)^{3/2} δ³ exp(−2 p² δ²)` (atomic units).
pub fn gaussian_limit(p_offset: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::domain("delta", "positive", delta));
    }
    Ok((2.0 / PI).powf(1.5) * delta.powi(3) * (-2.0 * p_offset * p_offset * delta * delta).exp())
}

/// Wide-packet limit `(8/π²)(1 + q²)⁻⁴`, the 1s electron's own distribution.
pub fn electron_limit(q: f64) -> Result<f64> {
    if !(q >= 0.0) {
        return Err(Error::domain("q", "non-negative", q));
    }
    Ok(8.0 / (PI * PI) / (1.0 + q * q).powi(4))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumDistribution {
    pub q_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub z0: f64,
}

impl MomentumDistribution {
    /// Evaluates the density on `q_grid` (in parallel, order preserved).
    pub fn tabulate(kernel: CoherenceKernel, z0: f64, q_grid: &[f64]) -> Result<Self> {
        let profile = MomentumProfile::new(kernel, z0)?;
        let values = q_grid
            .par_iter()
            .map(|&q| profile.density(q))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            q_grid: q_grid.to_vec(),
            values,
            z0,
        })
    }
}

fn j0(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `∫ dx ψ(x + u/2) ψ*(x − u/2)` along one Cartesian axis: the off-diagonal
/// profile averaged along the diagonal.
pub fn diagonal_average(
    packet: &GaussianPacket,
    axis: usize,
    u: f64,
    t: f64,
) -> Result<num_complex::Complex64> {
    let c = packet.centre(t)[axis];
    let w = packet.width(t);
    let points: Vec<f64> = (-6..=6).map(|i| c + 2.0 * w * i as f64).collect();
    let spec = QuadratureSpec::default().with_tolerances(1e-12, 1e-13);
    let prod = |x: f64| {
        packet.evaluate_axis(axis, x + 0.5 * u, t) * packet.evaluate_axis(axis, x - 0.5 * u, t).conj()
    };
    let re = try_integrate_with_breakpoints(|x| Ok(prod(x).re), &points, &spec)?;
    let im = try_integrate_with_breakpoints(|x| Ok(prod(x).im), &points, &spec)?;
    let context = "diagonal average";
    Ok(num_complex::Complex64::new(
        converged(re, context)?,
        converged(im, context)?,
    ))
}

/// Momentum density from the general construction: average the off-diagonal
/// elements along the diagonal numerically, then take the 3D Fourier transform
/// with the kernel.
///
/// Supports Gaussian packets whose mean momentum lies along a coordinate axis
/// and isotropic kernels. The Gaussian is separable, so the diagonal average
/// is `e^{iP₀·u}` times the product of three identical transverse profiles;
/// the transverse profile is computed by quadrature and the transform is done
/// with the spherical Bessel function `j₀`.
pub fn momentum_density_generic(
    packet: &GaussianPacket,
    kernel: &CoherenceKernel,
    p: Vec3,
    t: f64,
) -> Result<f64> {
    let moving = packet.p0.iter().filter(|c| **c != 0.0).count();
    if moving > 1 {
        return Err(Error::Unsupported(
            "mean momentum must lie along a coordinate axis".into(),
        ));
    }
    let axis = packet.p0.iter().position(|c| *c == 0.0).unwrap_or(0);
    let q = norm3(sub3(p, packet.p0));
    let a0 = diagonal_average(packet, axis, 0.0, t)?.re;
    let radial = |u: f64| -> Result<f64> {
        let a = diagonal_average(packet, axis, u, t)?.re;
        Ok(a * a0 * a0 * kernel.profile(u))
    };
    let decay = (1.25 * kernel.decay_length()).min(1.2 * packet.delta);
    let spec = QuadratureSpec::default()
        .with_tolerances(1e-10, 1e-15 * packet.delta.powi(3).max(1.0))
        .with_decay_scale(decay);
    let r = try_integrate_semi_infinite(
        |u| {
            radial(u)
                .map(|v| u * u * j0(q * u) * v)
                .map_err(|e| nested(u, e))
        },
        &[decay, 4.0 * decay],
        &spec,
    )?;
    Ok(converged(r, "generic momentum density")? / (2.0 * PI * PI))
}
