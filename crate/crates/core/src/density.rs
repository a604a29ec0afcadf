//! Reduced density matrix of the nucleus in the Born–Oppenheimer product
//! state: a closed-form separable callable `ψ(r)ψ*(r′)·D(|r−r′|)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_semi_infinite, QuadratureSpec};
use crate::wavepacket::GaussianPacket;
use crate::{norm3, sub3, Vec3};

/// Effective nuclear charge of the helium variational 1s² trial state.
pub const HELIUM_Z_EFF: f64 = 27.0 / 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Species {
    /// One 1s electron.
    Hydrogen,
    /// Two 1s electrons with a screened charge.
    Helium,
    /// Bare nucleus; no electron to entangle with, so `D ≡ 1`.
    Bare,
}

/// Off-diagonal decay factor `D(s)` multiplying `ψψ*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceKernel {
    pub species: Species,
    pub z_eff: f64,
}

impl CoherenceKernel {
    pub fn hydrogen() -> Self {
        Self {
            species: Species::Hydrogen,
            z_eff: 1.0,
        }
    }

    pub fn helium() -> Self {
        Self {
            species: Species::Helium,
            z_eff: HELIUM_Z_EFF,
        }
    }

    pub fn bare() -> Self {
        Self {
            species: Species::Bare,
            z_eff: 1.0,
        }
    }

    pub fn new(species: Species, z_eff: f64) -> Result<Self> {
        if !(z_eff > 0.0 && z_eff.is_finite()) {
            return Err(Error::domain("z_eff", "positive", z_eff));
        }
        Ok(Self { species, z_eff })
    }

    /// `D(s)` for a separation `s ≥ 0` in Bohr radii.
    pub fn eval(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::domain("separation", "non-negative", s));
        }
        Ok(self.profile(s))
    }

    /// Unchecked `D(|s|)`.
    pub fn profile(&self, s: f64) -> f64 {
        let s = s.abs();
        match self.species {
            Species::Hydrogen => hydrogen_profile(self.z_eff * s),
            Species::Helium => {
                let d = hydrogen_profile(self.z_eff * s);
                d * d
            }
            Species::Bare => 1.0,
        }
    }

    /// Length over which `D` falls by `e`, up to the polynomial prefactor.
    pub fn decay_length(&self) -> f64 {
        match self.species {
            Species::Hydrogen => 1.0 / self.z_eff,
            Species::Helium => 0.5 / self.z_eff,
            Species::Bare => f64::INFINITY,
        }
    }

    /// Separation at which `D` drops to one half, by bisection.
    pub fn half_width(&self) -> Option<f64> {
        if self.species == Species::Bare {
            return None;
        }
        let (mut lo, mut hi) = (0.0, 40.0 * self.decay_length());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.profile(mid) > 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

fn hydrogen_profile(s: f64) -> f64 {
    (1.0 + s + s * s / 3.0) * (-s).exp()
}

/// `(1 + s + s²/3)e^{−s}`.
pub fn hydrogen_kernel(s: f64) -> Result<f64> {
    CoherenceKernel::hydrogen().eval(s)
}

/// `[(1 + s + s²/3)e^{−s}]²` with `s = Z*·s_phys`.
pub fn helium_kernel(s_phys: f64) -> Result<f64> {
    CoherenceKernel::helium().eval(s_phys)
}

/// `ρ(r, r′; t) = ψ(r,t) ψ*(r′,t) D(|r − r′|)`.
pub fn reduced_density(
    packet: &GaussianPacket,
    kernel: &CoherenceKernel,
    r: Vec3,
    r_prime: Vec3,
    t: f64,
) -> Complex64 {
    let s = norm3(sub3(r, r_prime));
    packet.evaluate(r, t) * packet.evaluate(r_prime, t).conj() * kernel.profile(s)
}

/// Envelope bounding `|ρ(r, r′)| / max|ψ|²` at separation `s`.
pub fn offdiagonal_bound(kernel: &CoherenceKernel, s: f64) -> Result<f64> {
    kernel.eval(s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub samples: usize,
    /// Largest `|ρ| / (max|ψ|²·envelope)` seen; at most one when the bound holds.
    pub max_ratio: f64,
    pub violations: usize,
}

/// Checks `|ρ(r, r′)| ≤ max|ψ|²·D(|r−r′|)` on the supplied argument pairs.
pub fn check_offdiagonal_bound<I>(
    packet: &GaussianPacket,
    kernel: &CoherenceKernel,
    t: f64,
    pairs: I,
) -> BoundCheck
where
    I: IntoIterator<Item = (Vec3, Vec3)>,
{
    let peak = packet.peak_density(t);
    let mut check = BoundCheck {
        samples: 0,
        max_ratio: 0.0,
        violations: 0,
    };
    for (r, rp) in pairs {
        let s = norm3(sub3(r, rp));
        let bound = peak * kernel.profile(s);
        let ratio = reduced_density(packet, kernel, r, rp, t).norm() / bound;
        check.samples += 1;
        check.max_ratio = check.max_ratio.max(ratio);
        if ratio > 1.0 + 1e-12 {
            check.violations += 1;
        }
    }
    check
}

/// `Tr ρ²` of the hydrogen nucleus for `z = a_B/Δx`:
/// `z³/(2√π) ∫₀^∞ s²(1+s+s²/3)² exp(−2s − s²z²/4) ds`.
pub fn purity(z: f64) -> Result<f64> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::domain("z", "positive", z));
    }
    let integrand = |s: f64| {
        let p = 1.0 + s + s * s / 3.0;
        s * s * p * p * (-2.0 * s - 0.25 * s * s * z * z).exp()
    };
    let spec = QuadratureSpec::default()
        .with_tolerances(1e-11, 0.0)
        .with_decay_scale(1.0 / (2.0 + 0.5 * z));
    let r = integrate_semi_infinite(integrand, &spec)?;
    if !r.converged {
        return Err(Error::NotConverged {
            context: format!("purity at z = {z}"),
            value: r.value,
            error_estimate: r.error_estimate,
        });
    }
    Ok(z.powi(3) / (2.0 * std::f64::consts::PI.sqrt()) * r.value)
}

/// Purity of the hydrogen nucleus carried by `packet` at time `t`.
pub fn packet_purity(packet: &GaussianPacket, t: f64) -> Result<f64> {
    purity(packet.z_parameter(t))
}

/// Small-`z` limit of `purity(z)/z³`: `33/(16√π)`.
pub fn purity_small_z_coefficient() -> f64 {
    33.0 / (16.0 * std::f64::consts::PI.sqrt())
}
