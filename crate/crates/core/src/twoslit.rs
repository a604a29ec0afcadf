//! Two-slit thought experiment with the atom's electron either kept (coherent
//! superposition of the two packets) or stripped at the slits (incoherent sum).

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::hydrogen_kernel;
use crate::error::{Error, Result};
use crate::wavepacket::GaussianPacket;
use crate::{dot3, norm3, sub3, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoSlitConfig {
    pub slit1: Vec3,
    pub slit2: Vec3,
    pub amp1: Complex64,
    pub amp2: Complex64,
    /// Initial width of each outgoing packet.
    pub packet_delta: f64,
    pub mass: f64,
    /// Flight time to the screen.
    pub t0: f64,
    /// Common forward momentum of both packets.
    pub p0: Vec3,
}

impl TwoSlitConfig {
    /// Slits at `(∓d/2, 0, 0)`, equal amplitudes, forward momentum along `z`.
    pub fn symmetric(separation: f64, delta: f64, mass: f64, forward: f64, t0: f64) -> Result<Self> {
        let c = Self {
            slit1: [-0.5 * separation, 0.0, 0.0],
            slit2: [0.5 * separation, 0.0, 0.0],
            amp1: Complex64::new(FRAC_1_SQRT_2, 0.0),
            amp2: Complex64::new(FRAC_1_SQRT_2, 0.0),
            packet_delta: delta,
            mass,
            t0,
            p0: [0.0, 0.0, forward],
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.amp1.norm_sqr() + self.amp2.norm_sqr();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "|a|^2 + |b|^2 must be 1, got {n}"
            )));
        }
        if !(self.separation() > 0.0) {
            return Err(Error::InvalidConfig("slits must not coincide".into()));
        }
        if !(self.t0 >= 0.0 && self.t0.is_finite()) {
            return Err(Error::domain("flight time t0", "non-negative", self.t0));
        }
        GaussianPacket::new(self.packet_delta, self.slit1, self.p0, self.mass)?;
        Ok(())
    }

    pub fn separation(&self) -> f64 {
        norm3(sub3(self.slit2, self.slit1))
    }

    /// The packets launched from slit 1 and slit 2.
    pub fn packets(&self) -> Result<(GaussianPacket, GaussianPacket)> {
        Ok((
            GaussianPacket::new(self.packet_delta, self.slit1, self.p0, self.mass)?,
            GaussianPacket::new(self.packet_delta, self.slit2, self.p0, self.mass)?,
        ))
    }

    /// Spreading parameter `ħt₀/(2Mδ²)` at the screen.
    pub fn spreading(&self) -> f64 {
        self.t0 / (2.0 * self.mass * self.packet_delta * self.packet_delta)
    }

    /// Point on the screen midway between the two packet centres.
    pub fn screen_centre(&self) -> Vec3 {
        let v = self.t0 / self.mass;
        std::array::from_fn(|i| 0.5 * (self.slit1[i] + self.slit2[i]) + self.p0[i] * v)
    }

    /// Unit vector along the screen line: the slit axis with the component
    /// along the forward momentum removed.
    pub fn screen_axis(&self) -> Result<Vec3> {
        let d = sub3(self.slit2, self.slit1);
        let p2 = dot3(self.p0, self.p0);
        let along = if p2 > 0.0 { dot3(d, self.p0) / p2 } else { 0.0 };
        let perp: Vec3 = std::array::from_fn(|i| d[i] - along * self.p0[i]);
        let n = norm3(perp);
        if !(n > 0.0) {
            return Err(Error::InvalidConfig(
                "slit axis is parallel to the forward momentum".into(),
            ));
        }
        Ok(perp.map(|c| c / n))
    }

    /// Screen points at the given offsets from [`screen_centre`](Self::screen_centre).
    pub fn screen_line(&self, offsets: &[f64]) -> Result<Vec<Vec3>> {
        let c = self.screen_centre();
        let e = self.screen_axis()?;
        Ok(offsets
            .iter()
            .map(|&u| std::array::from_fn(|i| c[i] + u * e[i]))
            .collect())
    }

    /// Fringe period `2π/K` on the screen line, with
    /// `K = θ d⊥ / (2δ²(1 + θ²))` and `d⊥` the transverse slit separation.
    pub fn expected_fringe_period(&self) -> Result<f64> {
        let theta = self.spreading();
        if theta == 0.0 {
            return Err(Error::Singular("no fringes at t0 = 0".into()));
        }
        let d_perp = dot3(sub3(self.slit2, self.slit1), self.screen_axis()?);
        let d2 = self.packet_delta * self.packet_delta;
        let k = theta * d_perp / (2.0 * d2 * (1.0 + theta * theta));
        Ok(2.0 * std::f64::consts::PI / k)
    }
}

fn amplitudes(config: &TwoSlitConfig, r: Vec3) -> Result<(Complex64, Complex64)> {
    let (alpha, beta) = config.packets()?;
    Ok((alpha.evaluate(r, config.t0), beta.evaluate(r, config.t0)))
}

/// `|a α + b β|²`: the electron stays bound and carries no which-slit record.
pub fn coherent_pattern(config: &TwoSlitConfig, r: Vec3) -> Result<f64> {
    let (a, b) = amplitudes(config, r)?;
    Ok((config.amp1 * a + config.amp2 * b).norm_sqr())
}

/// `|a|²|α|² + |b|²|β|²`: the electron was ionized at the slits.
pub fn decohered_pattern(config: &TwoSlitConfig, r: Vec3) -> Result<f64> {
    let (a, b) = amplitudes(config, r)?;
    Ok(config.amp1.norm_sqr() * a.norm_sqr() + config.amp2.norm_sqr() * b.norm_sqr())
}

/// `2 Re[a b* α β*]`, the cross term separating the two patterns.
pub fn interference_term(config: &TwoSlitConfig, r: Vec3) -> Result<f64> {
    let (a, b) = amplitudes(config, r)?;
    Ok(2.0 * (config.amp1 * config.amp2.conj() * a * b.conj()).re)
}

/// Overlap of the electron states bound at either slit.
pub fn schmidt_overlap(config: &TwoSlitConfig) -> Result<f64> {
    hydrogen_kernel(config.separation())
}

/// Fringe contrast `(max − min)/(max + min)` of sampled densities.
pub fn visibility(samples: &[f64]) -> Result<f64> {
    if samples.len() < 3 {
        return Err(Error::InvalidConfig(format!(
            "visibility needs at least 3 samples, got {}",
            samples.len()
        )));
    }
    if let Some(bad) = samples.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::domain("pattern sample", "finite and non-negative", *bad));
    }
    let max = samples.iter().copied().fold(f64::MIN, f64::max);
    let min = samples.iter().copied().fold(f64::MAX, f64::min);
    if max == 0.0 {
        return Err(Error::Singular("all pattern samples are zero".into()));
    }
    Ok((max - min) / (max + min))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenScan {
    /// Offsets along the screen line.
    pub offsets: Vec<f64>,
    pub coherent: Vec<f64>,
    pub decohered: Vec<f64>,
    pub visibility_coherent: f64,
    pub visibility_decohered: f64,
}

/// Samples both patterns on `n` evenly spaced offsets in `[-half_span, half_span]`.
pub fn scan_screen(config: &TwoSlitConfig, n: usize, half_span: f64) -> Result<ScreenScan> {
    config.validate()?;
    if n < 3 {
        return Err(Error::InvalidConfig(format!("need at least 3 screen points, got {n}")));
    }
    if !(half_span > 0.0 && half_span.is_finite()) {
        return Err(Error::domain("screen half span", "positive", half_span));
    }
    let offsets: Vec<f64> = (0..n)
        .map(|i| -half_span + 2.0 * half_span * i as f64 / (n - 1) as f64)
        .collect();
    let points = config.screen_line(&offsets)?;
    let (coherent, decohered): (Vec<f64>, Vec<f64>) = points
        .par_iter()
        .map(|&r| Ok((coherent_pattern(config, r)?, decohered_pattern(config, r)?)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    Ok(ScreenScan {
        visibility_coherent: visibility(&coherent)?,
        visibility_decohered: visibility(&decohered)?,
        offsets,
        coherent,
        decohered,
    })
}

/// [`scan_screen`] over the central fringe, one expected period wide.
pub fn scan_central_fringe(config: &TwoSlitConfig, n: usize) -> Result<ScreenScan> {
    scan_screen(config, n, 0.5 * config.expected_fringe_period()?)
}
