//! Physical constants and the handful of conversions the rest of the crate needs.
//!
//! Everything downstream works in atomic-style units (`ħ = m_e = a_B = 1`).
//! This module is the only place SI values live.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CODATA 2018 values, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Reduced Planck constant (J·s).
    pub hbar: f64,
    /// Electron mass (kg).
    pub m_e: f64,
    /// Proton mass (kg).
    pub m_p: f64,
    /// Neutron mass (kg).
    pub m_n: f64,
    /// Alpha-particle mass (kg).
    pub m_alpha: f64,
    /// Bohr radius (m).
    pub a_b: f64,
    /// `e²/4πε₀` (J·m).
    pub e2_coulomb: f64,
    /// One electronvolt (J).
    pub ev: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: 1.054_571_817e-34,
            m_e: 9.109_383_701_5e-31,
            m_p: 1.672_621_923_69e-27,
            m_n: 1.674_927_498_04e-27,
            m_alpha: 6.644_657_335_7e-27,
            a_b: 5.291_772_109_03e-11,
            e2_coulomb: 2.307_077_552_341_735_5e-28,
            ev: 1.602_176_634e-19,
        }
    }
}

/// Keys accepted by [`PhysicalConstants::set`].
pub const CONSTANT_KEYS: &[&str] = &[
    "hbar",
    "m_e",
    "m_p",
    "m_n",
    "m_alpha",
    "m_alpha_over_m_n",
    "a_b",
    "e2_coulomb",
    "ev",
];

impl PhysicalConstants {
    /// Overrides one constant by key. Changing `hbar`, `m_e` or `a_b` re-derives
    /// `e2_coulomb` so the Bohr-radius identity keeps holding; setting
    /// `e2_coulomb` re-derives `a_b`.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "constant {key} must be finite and positive, got {value}"
            )));
        }
        let mut next = *self;
        next.apply(key, value)?;
        next.validate()?;
        *self = next;
        Ok(())
    }

    fn apply(&mut self, key: &str, value: f64) -> Result<()> {
        match key {
            "hbar" => {
                self.hbar = value;
                self.rederive_coulomb();
            }
            "m_e" => {
                self.m_e = value;
                self.rederive_coulomb();
            }
            "m_p" => self.m_p = value,
            "m_n" => self.m_n = value,
            "m_alpha" => self.m_alpha = value,
            "m_alpha_over_m_n" => self.m_alpha = value * self.m_n,
            "a_b" => {
                self.a_b = value;
                self.rederive_coulomb();
            }
            "e2_coulomb" => {
                self.e2_coulomb = value;
                self.a_b = self.hbar * self.hbar / (self.m_e * value);
            }
            "ev" => self.ev = value,
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "unknown constant {key}; valid keys: {}",
                    CONSTANT_KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    fn rederive_coulomb(&mut self) {
        self.e2_coulomb = self.hbar * self.hbar / (self.m_e * self.a_b);
    }

    /// Checks the type invariants.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("hbar", self.hbar),
            ("m_e", self.m_e),
            ("m_p", self.m_p),
            ("m_n", self.m_n),
            ("m_alpha", self.m_alpha),
            ("a_b", self.a_b),
            ("e2_coulomb", self.e2_coulomb),
            ("ev", self.ev),
        ];
        if let Some((name, v)) = fields.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidConfig(format!(
                "constant {name} must be positive, got {v}"
            )));
        }
        let bohr = self.hbar * self.hbar / (self.m_e * self.e2_coulomb);
        if ((bohr - self.a_b) / self.a_b).abs() > 1e-6 {
            return Err(Error::InvalidConfig(format!(
                "a_b = {} disagrees with hbar^2/(m_e e^2) = {bohr}",
                self.a_b
            )));
        }
        // CODATA gives 3.9671; the fixed-ratio studies use exactly 4.
        let ratio = self.m_alpha / self.m_n;
        if !(3.95..=4.0).contains(&ratio) {
            return Err(Error::InvalidConfig(format!(
                "m_alpha/m_n = {ratio} outside [3.95, 4.0]"
            )));
        }
        Ok(())
    }

    pub fn ev_to_joule(&self, ev: f64) -> f64 {
        ev * self.ev
    }

    pub fn joule_to_ev(&self, joule: f64) -> f64 {
        joule / self.ev
    }

    pub fn bohr_to_meter(&self, bohr: f64) -> f64 {
        bohr * self.a_b
    }

    pub fn meter_to_bohr(&self, meter: f64) -> f64 {
        meter / self.a_b
    }

    /// Atomic unit of time `ħ/E_h = m_e a_B² / ħ` (s).
    pub fn atomic_time(&self) -> f64 {
        self.m_e * self.a_b * self.a_b / self.hbar
    }

    /// Mass in units of the electron mass.
    pub fn mass_in_electron_masses(&self, kg: f64) -> f64 {
        kg / self.m_e
    }

    /// Hydrogen atom mass `m_p + m_e` in electron masses.
    pub fn hydrogen_mass_au(&self) -> f64 {
        (self.m_p + self.m_e) / self.m_e
    }

    /// Helium nucleus mass in electron masses.
    pub fn alpha_mass_au(&self) -> f64 {
        self.m_alpha / self.m_e
    }

    /// `ħ/(m_e a_B)`, the electron orbital velocity scale (m/s). This is also
    /// the atomic unit of velocity.
    pub fn electron_velocity_scale(&self) -> f64 {
        self.hbar / (self.m_e * self.a_b)
    }

    /// `ħ/(m_p a_B)` (m/s).
    pub fn proton_velocity_scale(&self) -> f64 {
        self.electron_velocity_scale() * (self.m_e / self.m_p)
    }

    /// Neutron wavenumber `√(2 m_n E)/ħ` in 1/m for a kinetic energy in joules.
    pub fn neutron_wavenumber(&self, energy_j: f64) -> Result<f64> {
        if !(energy_j.is_finite() && energy_j > 0.0) {
            return Err(Error::domain("neutron energy", "positive", energy_j));
        }
        Ok((2.0 * self.m_n * energy_j).sqrt() / self.hbar)
    }

    /// Dimensionless neutron wavenumber `q = k a_B` for an energy in eV.
    pub fn neutron_q(&self, energy_ev: f64) -> Result<f64> {
        Ok(self.neutron_wavenumber(self.ev_to_joule(energy_ev))? * self.a_b)
    }

    /// Neutron speed `√(2E/m_n)` (m/s) for an energy in eV.
    pub fn neutron_speed(&self, energy_ev: f64) -> Result<f64> {
        Ok(self.neutron_wavenumber(self.ev_to_joule(energy_ev))? * self.hbar / self.m_n)
    }
}
