//! Slow-neutron scattering on a helium atom whose centre of mass is spread
//! much wider than the atom.
//!
//! The numeric path reduces the cross-section to a single integral over
//! `x = k′/k`,
//!
//! ```text
//! dσ/dΩ = (a²/π)((1+A)/A)² ∫₀^∞ x² F(w(x), κ(x)) dx,
//! ```
//!
//! with `A = m_α/m_n`, the energy mismatch `w = 1 − x² − |k̂ − x k̂′|²/A` and the
//! spectral width `κ = 2Z*|k̂ − x k̂′|/(A q)`, both in units of the neutron
//! energy `ħk²/2m_n`. `F` is the τ-transform of the squared helium kernel.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::HELIUM_Z_EFF;
use crate::error::{Error, Result};
use crate::quadrature::{
    integrate, try_integrate_fourier_complex, try_integrate_semi_infinite, QuadratureSpec,
};
use crate::units::PhysicalConstants;
use crate::wavepacket::GaussianPacket;

/// Polynomial coefficients of `(1 + t + t²/3)²`.
const KERNEL_SQUARED_COEFFS: [f64; 5] = [1.0, 2.0, 5.0 / 3.0, 2.0 / 3.0, 1.0 / 9.0];

/// Offset replacing `θ = 0` in the numeric path, where the τ-integral at the
/// elastic point is a delta function.
pub const FORWARD_EPSILON: f64 = 1e-6;

/// Below this `q` the asymptotic expansion is not trustworthy.
pub const ASYMPTOTIC_MIN_Q: f64 = 5.0;

const FM: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringConfig {
    /// Neutron kinetic energy (eV).
    pub energy_ev: f64,
    /// Neutron–alpha scattering length (fm).
    pub scatt_length_fm: f64,
    /// `a_B/δ` for the helium centre-of-mass packet.
    pub z0: f64,
    /// `m_α/m_n`.
    pub mass_ratio: f64,
    pub z_eff: f64,
    /// Interaction range entering the decoherence condition (fm).
    pub nucleus_size_fm: f64,
}

impl Default for ScatteringConfig {
    fn default() -> Self {
        Self {
            energy_ev: 1.0,
            scatt_length_fm: 3.26,
            z0: 0.0,
            mass_ratio: 4.0,
            z_eff: HELIUM_Z_EFF,
            nucleus_size_fm: 0.2,
        }
    }
}

impl ScatteringConfig {
    pub fn at_energy(energy_ev: f64) -> Result<Self> {
        let c = Self {
            energy_ev,
            ..Self::default()
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.energy_ev > 0.0 && self.energy_ev.is_finite()) {
            return Err(Error::domain("energy_ev", "positive", self.energy_ev));
        }
        if !(self.scatt_length_fm != 0.0 && self.scatt_length_fm.is_finite()) {
            return Err(Error::domain("scatt_length_fm", "non-zero", self.scatt_length_fm));
        }
        if !(self.z0 >= 0.0 && self.z0.is_finite()) {
            return Err(Error::domain("z0", "non-negative", self.z0));
        }
        if !(self.mass_ratio > 1.0 && self.mass_ratio.is_finite()) {
            return Err(Error::domain("mass_ratio", "greater than 1", self.mass_ratio));
        }
        if !(self.z_eff > 0.0 && self.z_eff.is_finite()) {
            return Err(Error::domain("z_eff", "positive", self.z_eff));
        }
        if !(self.nucleus_size_fm > 0.0 && self.nucleus_size_fm.is_finite()) {
            return Err(Error::domain("nucleus_size_fm", "positive", self.nucleus_size_fm));
        }
        Ok(())
    }

    /// Dimensionless neutron wavenumber `q = k a_B`.
    pub fn q(&self, constants: &PhysicalConstants) -> Result<f64> {
        constants.neutron_q(self.energy_ev)
    }

    fn scatt_length_m(&self) -> f64 {
        self.scatt_length_fm * FM
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub value: f64,
    pub threshold: f64,
    /// How many times the condition is satisfied; `> 1` means it holds.
    pub margin: f64,
}

impl Margin {
    fn below(value: f64, threshold: f64) -> Self {
        Self {
            value,
            threshold,
            margin: threshold / value,
        }
    }

    fn above(value: f64, threshold: f64) -> Self {
        Self {
            value,
            threshold,
            margin: value / threshold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// Packet velocity spread against `ħ/(m_e a_B)` (m/s).
    pub born_oppenheimer: Margin,
    /// Packet velocity spread against `ħ/(M a_B)` (m/s).
    pub almost_diagonal: Margin,
    /// Neutron speed against `√(d/a_B)·ħ/(m_e a_B)` (m/s).
    pub decoherence: Margin,
    /// Neutron energy at which the decoherence margin is 1 (eV).
    pub boundary_energy_ev: f64,
    pub neutron_speed: f64,
    pub q: f64,
}

/// Evaluates the regime conditions. Never fails on a physically odd regime;
/// it only reports the margins.
pub fn check_conditions(
    config: &ScatteringConfig,
    packet: &GaussianPacket,
    constants: &PhysicalConstants,
) -> Result<ConditionReport> {
    config.validate()?;
    let ve = constants.electron_velocity_scale();
    let dv = packet.velocity_spread() * ve;
    let diag = ve / packet.mass;
    let threshold = (config.nucleus_size_fm * FM / constants.a_b).sqrt() * ve;
    let speed = constants.neutron_speed(config.energy_ev)?;
    let boundary = constants.joule_to_ev(0.5 * constants.m_n * threshold * threshold);
    Ok(ConditionReport {
        born_oppenheimer: Margin::below(dv, ve),
        almost_diagonal: Margin::below(dv, diag),
        decoherence: Margin::above(speed, threshold),
        boundary_energy_ev: boundary,
        neutron_speed: speed,
        q: config.q(constants)?,
    })
}

/// `κ = (ħ/m_α)·Z*·|k − k′|/a_B` (1/s) for wavenumbers in 1/m.
pub fn kappa(
    k: f64,
    k_prime: f64,
    theta: f64,
    config: &ScatteringConfig,
    constants: &PhysicalConstants,
) -> Result<f64> {
    if !(k >= 0.0) {
        return Err(Error::domain("k", "non-negative", k));
    }
    if !(k_prime >= 0.0) {
        return Err(Error::domain("k_prime", "non-negative", k_prime));
    }
    let half = (0.5 * theta).sin();
    let transfer = ((k - k_prime).powi(2) + 4.0 * k * k_prime * half * half).sqrt();
    let m_alpha = config.mass_ratio * constants.m_n;
    Ok(constants.hbar / m_alpha * config.z_eff * transfer / constants.a_b)
}

/// `F(ω) = ∫ e^{−2κ|τ|}(1 + κ|τ| + κ²τ²/3)² e^{−iωτ − z₀²κ²τ²/8} dτ`.
///
/// Closed form for `z₀ = 0`, quadrature otherwise. Real and even in `ω`.
pub fn tau_transform(kappa_val: f64, omega: f64, z0: f64) -> Result<Complex64> {
    if !(kappa_val >= 0.0 && kappa_val.is_finite()) {
        return Err(Error::domain("kappa", "non-negative", kappa_val));
    }
    if !omega.is_finite() {
        return Err(Error::domain("omega", "finite", omega));
    }
    if !(z0 >= 0.0 && z0.is_finite()) {
        return Err(Error::domain("z0", "non-negative", z0));
    }
    if kappa_val == 0.0 {
        return Err(Error::Singular(
            "kappa = 0: the transform is a delta function in omega".into(),
        ));
    }
    if z0 == 0.0 {
        Ok(Complex64::new(tau_closed_form(kappa_val, omega), 0.0))
    } else {
        tau_transform_numeric(kappa_val, omega, z0)
    }
}

fn tau_closed_form(kappa: f64, omega: f64) -> f64 {
    let base = Complex64::new(2.0 * kappa, omega.abs()).inv();
    let mut power = base;
    let mut scale = 1.0;
    let mut sum = Complex64::new(0.0, 0.0);
    for (n, c) in KERNEL_SQUARED_COEFFS.iter().enumerate() {
        if n > 0 {
            scale *= kappa * n as f64;
            power *= base;
        }
        sum += power * (c * scale);
    }
    2.0 * sum.re
}

/// [`tau_transform`] by direct Fourier quadrature, for any `z₀ ≥ 0`.
pub fn tau_transform_numeric(kappa_val: f64, omega: f64, z0: f64) -> Result<Complex64> {
    if !(kappa_val > 0.0 && kappa_val.is_finite()) {
        return Err(Error::domain("kappa", "positive", kappa_val));
    }
    let envelope = |tau: f64| {
        let t = kappa_val * tau;
        let d = (1.0 + t + t * t / 3.0) * (-t).exp();
        Ok(d * d * (-z0 * z0 * t * t / 8.0).exp())
    };
    // The full-line integral of the envelope is at most 7/(2κ); the absolute
    // tolerance sits just above the roundoff floor that sets.
    let spec = QuadratureSpec::default()
        .with_tolerances(1e-12, 1e-13 / kappa_val)
        .with_decay_scale(1.0 / kappa_val);
    let r = try_integrate_fourier_complex(envelope, omega, &spec)?;
    if !r.converged {
        return Err(Error::NotConverged {
            context: format!("tau transform at kappa = {kappa_val}, omega = {omega}, z0 = {z0}"),
            value: r.value.re,
            error_estimate: r.error_estimate,
        });
    }
    Ok(r.value)
}

/// Location and width of the quasi-elastic line in `x = k′/k`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Peak {
    x0: f64,
    width: f64,
    /// `|dw/dx|` at the peak.
    slope: f64,
}

struct Kinematics {
    cos_theta: f64,
    sin_half_sq: f64,
    mass_ratio: f64,
    /// `2Z*/(A q)`.
    kappa_scale: f64,
}

impl Kinematics {
    fn new(config: &ScatteringConfig, q: f64, theta: f64) -> Self {
        Self {
            cos_theta: theta.cos(),
            sin_half_sq: (0.5 * theta).sin().powi(2),
            mass_ratio: config.mass_ratio,
            kappa_scale: 2.0 * config.z_eff / (config.mass_ratio * q),
        }
    }

    /// `|k̂ − x k̂′|²`, written to stay accurate near forward scattering.
    fn transfer_sq(&self, x: f64) -> f64 {
        (1.0 - x) * (1.0 - x) + 4.0 * x * self.sin_half_sq
    }

    fn transfer(&self, x: f64) -> f64 {
        self.transfer_sq(x).sqrt()
    }

    fn omega(&self, x: f64) -> f64 {
        (1.0 - x) * (1.0 + x) - self.transfer_sq(x) / self.mass_ratio
    }

    fn kappa(&self, x: f64) -> f64 {
        self.kappa_scale * self.transfer(x)
    }

    fn peak(&self) -> Peak {
        let (a, c) = (self.mass_ratio, self.cos_theta);
        let x0 = (c + (c * c + a * a - 1.0).sqrt()) / (a + 1.0);
        let slope = 2.0 / a * ((a + 1.0) * x0 - c);
        Peak {
            x0,
            width: self.kappa(x0) / slope,
            slope,
        }
    }
}

fn prefactor(config: &ScatteringConfig) -> f64 {
    let a = config.scatt_length_m();
    let ratio = (1.0 + config.mass_ratio) / config.mass_ratio;
    a * a * ratio * ratio / PI
}

/// Lab-frame `dσ/dΩ` (m²/sr) from the full k′ and τ integrals.
pub fn diff_cross_section_numeric(
    config: &ScatteringConfig,
    theta: f64,
    constants: &PhysicalConstants,
) -> Result<f64> {
    config.validate()?;
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::domain("theta", "in [0, pi]", theta));
    }
    let theta = theta.max(FORWARD_EPSILON);
    let q = config.q(constants)?;
    let kin = Kinematics::new(config, q, theta);
    let peak = kin.peak();

    let mut points = vec![peak.x0];
    let mut j = -3;
    while peak.width * 2f64.powi(j) < 10.0 {
        for side in [-1.0, 1.0] {
            let p = peak.x0 + side * peak.width * 2f64.powi(j);
            if p > 0.0 {
                points.push(p);
            }
        }
        j += 1;
    }

    // Leading-order size of the integral: the weight of the delta function.
    let lead = 2.0 * PI * peak.x0 * peak.x0 / peak.slope;
    let spec = QuadratureSpec {
        rel_tol: 1e-11,
        abs_tol: 1e-15 * lead,
        max_subdivisions: 20_000,
        decay_scale: 0.25 * (peak.x0 + 10.0 * peak.width).max(1.0),
    };
    let z0 = config.z0;
    let r = try_integrate_semi_infinite(
        |x| {
            let f = tau_transform(kin.kappa(x), kin.omega(x), z0).map_err(|e| {
                crate::quadrature::QuadratureError::Nested {
                    x,
                    message: e.to_string(),
                }
            })?;
            Ok(x * x * f.re)
        },
        &points,
        &spec,
    )
    .map_err(|e| {
        Error::NotConverged {
            context: format!(
                "cross-section at theta = {theta}, E = {} eV (peak x0 = {}, width = {}): {e}",
                config.energy_ev, peak.x0, peak.width
            ),
            value: f64::NAN,
            error_estimate: f64::NAN,
        }
    })?;
    if !r.converged {
        return Err(Error::NotConverged {
            context: format!(
                "cross-section at theta = {theta}, E = {} eV (peak x0 = {}, width = {})",
                config.energy_ev, peak.x0, peak.width
            ),
            value: r.value,
            error_estimate: r.error_estimate,
        });
    }
    Ok(prefactor(config) * r.value)
}

/// Leading-order angular pattern `(cos θ + √(15 + cos²θ))² / √(15 + cos²θ)`.
pub fn f_theta(theta: f64) -> f64 {
    let c = theta.cos();
    let r = (15.0 + c * c).sqrt();
    (c + r) * (c + r) / r
}

/// Coefficient of the `1/q²` correction.
pub fn h_theta(theta: f64) -> f64 {
    let c = theta.cos();
    let s = 15.0 + c * c;
    let r = s.sqrt();
    6075.0 / 64.0 * (3.0 + 5.0 * c * c) / (s * s * (c + r) * (c + r))
}

/// `h(θ)/q²`, the relative size of the decoherence contribution.
pub fn anomalous_fraction(
    config: &ScatteringConfig,
    theta: f64,
    constants: &PhysicalConstants,
) -> Result<f64> {
    let q = config.q(constants)?;
    Ok(h_theta(theta) / (q * q))
}

/// `m_n² g² / (25π²ħ⁴)` with `g = 2πħ²a/μ` and `m_α = 4m_n`.
fn asymptotic_prefactor(config: &ScatteringConfig, constants: &PhysicalConstants) -> f64 {
    let m_n = constants.m_n;
    let mu = m_n * 4.0 * m_n / (m_n + 4.0 * m_n);
    let hbar2 = constants.hbar * constants.hbar;
    let g = 2.0 * PI * hbar2 * config.scatt_length_m() / mu;
    m_n * m_n * g * g / (25.0 * PI * PI * hbar2 * hbar2)
}

/// Large-`q` expansion of the cross-section (m²/sr), always with `m_α = 4m_n`.
pub fn diff_cross_section_asymptotic(
    config: &ScatteringConfig,
    theta: f64,
    constants: &PhysicalConstants,
) -> Result<f64> {
    config.validate()?;
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::domain("theta", "in [0, pi]", theta));
    }
    let q = config.q(constants)?;
    Ok(asymptotic_prefactor(config, constants) * f_theta(theta) * (1.0 + h_theta(theta) / (q * q)))
}

/// Leading-order asymptotic cross-section, without the `1/q²` term.
pub fn diff_cross_section_leading(
    config: &ScatteringConfig,
    theta: f64,
    constants: &PhysicalConstants,
) -> Result<f64> {
    config.validate()?;
    Ok(asymptotic_prefactor(config, constants) * f_theta(theta))
}

/// `∫ f(θ) dΩ` over the lab sphere by adaptive quadrature in `cos θ`.
pub fn f_theta_sphere_integral() -> Result<f64> {
    let spec = QuadratureSpec::default().with_tolerances(1e-13, 0.0);
    let r = integrate(|u: f64| f_theta(u.clamp(-1.0, 1.0).acos()), -1.0, 1.0, &spec)?;
    Ok(2.0 * PI * r.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMethod {
    Numeric,
    Asymptotic,
    Both,
}

impl ScanMethod {
    fn numeric(self) -> bool {
        matches!(self, Self::Numeric | Self::Both)
    }

    fn asymptotic(self) -> bool {
        matches!(self, Self::Asymptotic | Self::Both)
    }
}

impl std::str::FromStr for ScanMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "numeric" => Ok(Self::Numeric),
            "asymptotic" => Ok(Self::Asymptotic),
            "both" => Ok(Self::Both),
            _ => Err(Error::InvalidConfig(format!(
                "method must be numeric, asymptotic or both, got {s}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanFailure {
    pub index: usize,
    pub theta: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularTable {
    /// Lab angles (rad), uniform on `[0, π]`.
    pub theta_grid: Vec<f64>,
    pub dsigma_numeric: Vec<Option<f64>>,
    pub dsigma_asymptotic: Vec<Option<f64>>,
    /// `h(θ)/q²` at each angle.
    pub anomalous_fraction: Vec<f64>,
    pub q: f64,
    pub method: ScanMethod,
    pub failures: Vec<ScanFailure>,
}

impl AngularTable {
    /// Largest `|numeric − asymptotic|/asymptotic` over points where both exist.
    pub fn max_relative_deviation(&self) -> Option<f64> {
        self.dsigma_numeric
            .iter()
            .zip(&self.dsigma_asymptotic)
            .filter_map(|(n, a)| Some(((*n)? - (*a)?).abs() / (*a)?))
            .reduce(f64::max)
    }
}

/// Cross-sections on a uniform grid of `n_points` lab angles. Numeric failures
/// are recorded per point and do not stop the scan.
pub fn angular_scan(
    config: &ScatteringConfig,
    n_points: usize,
    method: ScanMethod,
    constants: &PhysicalConstants,
) -> Result<AngularTable> {
    config.validate()?;
    if n_points < 2 {
        return Err(Error::InvalidConfig(format!(
            "angular scan needs at least 2 points, got {n_points}"
        )));
    }
    let q = config.q(constants)?;
    let theta_grid: Vec<f64> = (0..n_points)
        .map(|i| PI * i as f64 / (n_points - 1) as f64)
        .collect();
    let numeric: Vec<Option<Result<f64>>> = theta_grid
        .par_iter()
        .map(|&t| method.numeric().then(|| diff_cross_section_numeric(config, t, constants)))
        .collect();
    let mut failures = Vec::new();
    let mut dsigma_numeric = Vec::with_capacity(n_points);
    for (index, r) in numeric.into_iter().enumerate() {
        dsigma_numeric.push(match r {
            Some(Ok(v)) => Some(v),
            Some(Err(e)) => {
                failures.push(ScanFailure {
                    index,
                    theta: theta_grid[index],
                    message: e.to_string(),
                });
                None
            }
            None => None,
        });
    }
    let dsigma_asymptotic = theta_grid
        .iter()
        .map(|&t| {
            method
                .asymptotic()
                .then(|| diff_cross_section_asymptotic(config, t, constants))
                .transpose()
        })
        .collect::<Result<Vec<_>>>()?;
    let anomalous_fraction = theta_grid.iter().map(|&t| h_theta(t) / (q * q)).collect();
    Ok(AngularTable {
        theta_grid,
        dsigma_numeric,
        dsigma_asymptotic,
        anomalous_fraction,
        q,
        method,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;
    use approx::assert_relative_eq;

    fn constants() -> PhysicalConstants {
        PhysicalConstants::default()
    }

    #[test]
    fn f_and_h_values() {
        assert_relative_eq!(f_theta(PI / 2.0), 15f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(f_theta(0.0), 25.0 / 4.0, max_relative = 1e-14);
        assert_relative_eq!(f_theta(PI), 9.0 / 4.0, max_relative = 1e-14);
        assert_relative_eq!(h_theta(0.0), 6075.0 / 64.0 * 8.0 / (256.0 * 25.0), max_relative = 1e-14);
        assert_relative_eq!(h_theta(PI), 6075.0 / 64.0 * 8.0 / (256.0 * 9.0), max_relative = 1e-14);
        assert_relative_eq!(h_theta(0.0), 0.118_652_343_75, max_relative = 1e-12);
        assert_relative_eq!(h_theta(PI) / h_theta(0.0), 25.0 / 9.0, max_relative = 1e-12);
        for i in 0..=100 {
            let t = PI * i as f64 / 100.0;
            assert!(f_theta(t) > 0.0 && h_theta(t) > 0.0);
        }
    }

    #[test]
    fn f_integrates_to_sixteen_pi() {
        let total = f_theta_sphere_integral().unwrap();
        assert!((total / (16.0 * PI) - 1.0).abs() < 1e-10, "{total}");
    }

    #[test]
    fn anomalous_fraction_scales_as_inverse_energy() {
        let c = constants();
        let one = ScatteringConfig::at_energy(1.0).unwrap();
        let two = ScatteringConfig::at_energy(2.0).unwrap();
        for t in [0.0, 1.0, PI] {
            let a = anomalous_fraction(&one, t, &c).unwrap();
            let b = anomalous_fraction(&two, t, &c).unwrap();
            assert_relative_eq!(a / b, 2.0, max_relative = 1e-12);
        }
        let h0 = anomalous_fraction(&one, 0.0, &c).unwrap();
        let hpi = anomalous_fraction(&one, PI, &c).unwrap();
        assert!((h0 / 8.2e-4 - 1.0).abs() < 0.1, "{h0}");
        assert!((hpi / 2.27e-3 - 1.0).abs() < 0.1, "{hpi}");
    }

    #[test]
    fn asymptotic_prefactor_is_a_squared_over_four() {
        let c = constants();
        let cfg = ScatteringConfig::default();
        let a = cfg.scatt_length_fm * 1e-15;
        assert_relative_eq!(asymptotic_prefactor(&cfg, &c), a * a / 4.0, max_relative = 1e-12);
        let high = ScatteringConfig::at_energy(1e6).unwrap();
        let lead = diff_cross_section_leading(&high, 0.3, &c).unwrap();
        let full = diff_cross_section_asymptotic(&high, 0.3, &c).unwrap();
        assert!((full / lead - 1.0) < 1e-6);
    }

    #[test]
    fn kappa_properties() {
        let c = constants();
        let cfg = ScatteringConfig::default();
        let k = 2.2e11;
        assert_eq!(kappa(k, k, 0.0, &cfg, &c).unwrap(), 0.0);
        let back = kappa(k, k, PI, &cfg, &c).unwrap();
        let expect = c.hbar / (4.0 * c.m_n) * HELIUM_Z_EFF * 2.0 * k / c.a_b;
        assert_relative_eq!(back, expect, max_relative = 1e-14);
        assert_relative_eq!(
            kappa(k, 0.3 * k, 1.1, &cfg, &c).unwrap(),
            kappa(0.3 * k, k, 1.1, &cfg, &c).unwrap(),
            max_relative = 1e-14
        );
        assert!(kappa(-1.0, k, 0.0, &cfg, &c).is_err());
    }

    #[test]
    fn tau_transform_closed_form_matches_quadrature() {
        for kappa in [0.3, 1.0, 4.0] {
            for omega in [0.0, 0.7, 3.0] {
                let closed = tau_transform(kappa, omega, 0.0).unwrap();
                let numeric = tau_transform_numeric(kappa, omega, 0.0).unwrap();
                assert!(
                    (closed - numeric).norm() <= 1e-9 * closed.norm(),
                    "{kappa} {omega}: {closed} vs {numeric}"
                );
            }
        }
        assert_relative_eq!(tau_transform(1.0, 0.0, 0.0).unwrap().re, 3.5, max_relative = 1e-14);
        assert_relative_eq!(tau_transform(2.0, 0.0, 0.0).unwrap().re, 1.75, max_relative = 1e-14);
        assert_relative_eq!(
            tau_transform(1.0, 3.0, 0.0).unwrap().re,
            0.018_185_099_099_632_9,
            max_relative = 1e-12
        );
    }

    #[test]
    fn tau_transform_is_real_and_even() {
        for z0 in [0.0, 0.5] {
            let a = tau_transform(0.8, 2.5, z0).unwrap();
            let b = tau_transform(0.8, -2.5, z0).unwrap();
            assert_eq!(a.im, 0.0);
            assert_relative_eq!(a.re, b.re, max_relative = 1e-12);
        }
        assert!(matches!(tau_transform(0.0, 1.0, 0.0), Err(Error::Singular(_))));
    }

    #[test]
    fn gaussian_damping_reduces_the_peak() {
        let plain = tau_transform(1.0, 0.0, 0.0).unwrap().re;
        let damped = tau_transform(1.0, 0.0, 1.0).unwrap().re;
        assert!(damped < plain && damped > 0.0);
        let tiny = tau_transform(1.0, 0.0, 1e-4).unwrap().re;
        assert!((tiny - plain).abs() < 1e-7);
    }

    #[test]
    fn numeric_approaches_asymptotic() {
        let c = constants();
        let cfg = ScatteringConfig::at_energy(1.0).unwrap();
        for t in [0.0, PI / 2.0, PI] {
            let n = diff_cross_section_numeric(&cfg, t, &c).unwrap();
            let a = diff_cross_section_asymptotic(&cfg, t, &c).unwrap();
            assert!((n / a - 1.0).abs() < 1e-4, "theta {t}: {n} vs {a}");
            let lead = diff_cross_section_leading(&cfg, t, &c).unwrap();
            assert!(n > lead);
        }
    }

    #[test]
    fn backward_to_forward_ratio() {
        let c = constants();
        let cfg = ScatteringConfig::at_energy(1.0).unwrap();
        let q = cfg.q(&c).unwrap();
        let ratio = diff_cross_section_numeric(&cfg, PI, &c).unwrap()
            / diff_cross_section_numeric(&cfg, 0.0, &c).unwrap();
        let expect =
            f_theta(PI) * (1.0 + h_theta(PI) / (q * q)) / (f_theta(0.0) * (1.0 + h_theta(0.0) / (q * q)));
        assert!((ratio / expect - 1.0).abs() < 0.01);
    }

    #[test]
    fn anomalous_part_halves_when_energy_doubles() {
        let c = constants();
        let part = |e: f64| {
            let cfg = ScatteringConfig::at_energy(e).unwrap();
            let t = 2.0;
            diff_cross_section_numeric(&cfg, t, &c).unwrap() / diff_cross_section_leading(&cfg, t, &c).unwrap()
                - 1.0
        };
        let r = part(1.0) / part(2.0);
        assert!((r / 2.0 - 1.0).abs() < 0.1, "{r}");
    }

    #[test]
    fn total_cross_section_is_four_pi_a_squared() {
        let c = constants();
        let cfg = ScatteringConfig::at_energy(4.0).unwrap();
        let (u, w) = gauss_legendre(24);
        let total: f64 = u
            .par_iter()
            .zip(&w)
            .map(|(u, w)| w * diff_cross_section_numeric(&cfg, u.acos(), &c).unwrap())
            .sum::<f64>()
            * 2.0
            * PI;
        let a = cfg.scatt_length_fm * 1e-15;
        assert!((total / (4.0 * PI * a * a) - 1.0).abs() < 0.02, "{total}");
    }

    #[test]
    fn scan_shapes() {
        let c = constants();
        let cfg = ScatteringConfig::at_energy(1.0).unwrap();
        let t = angular_scan(&cfg, 2, ScanMethod::Asymptotic, &c).unwrap();
        assert_eq!(t.theta_grid, vec![0.0, PI]);
        assert!(t.dsigma_numeric.iter().all(Option::is_none));
        let t = angular_scan(&cfg, 37, ScanMethod::Asymptotic, &c).unwrap();
        let fr = &t.anomalous_fraction;
        let argmax = fr.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert_eq!(argmax, 36);
        // Local maximum at θ = 0 as well.
        assert!(fr[0] > fr[1]);
        assert!(t.theta_grid.windows(2).all(|w| w[1] > w[0]));
        assert!(angular_scan(&cfg, 1, ScanMethod::Both, &c).is_err());
    }

    #[test]
    fn conditions_at_one_ev() {
        let c = constants();
        let cfg = ScatteringConfig::at_energy(1.0).unwrap();
        let packet = GaussianPacket::at_rest(1e4, c.alpha_mass_au()).unwrap();
        let r = check_conditions(&cfg, &packet, &c).unwrap();
        assert_relative_eq!(r.neutron_speed, 1.3832e4, max_relative = 1e-3);
        assert!(r.decoherence.margin > 3.0 && r.decoherence.margin < 3.6);
        assert!((r.boundary_energy_ev / 0.08 - 1.0).abs() < 0.25);
        let boundary = ScatteringConfig::at_energy(r.boundary_energy_ev).unwrap();
        let at = check_conditions(&boundary, &packet, &c).unwrap();
        assert_relative_eq!(at.decoherence.margin, 1.0, max_relative = 1e-10);
        assert!(r.born_oppenheimer.margin > 1e3);
    }

    #[test]
    fn slow_packet_is_almost_diagonal() {
        let c = constants();
        let m = c.hydrogen_mass_au();
        // Spread chosen so that ħ/(2Mδ) is 10 m/s.
        let delta = c.electron_velocity_scale() / (2.0 * m * 10.0);
        let packet = GaussianPacket::at_rest(delta, m).unwrap();
        let r = check_conditions(&ScatteringConfig::default(), &packet, &c).unwrap();
        assert_relative_eq!(r.almost_diagonal.value, 10.0, max_relative = 1e-12);
        assert!(r.almost_diagonal.margin > 50.0);
    }

    #[test]
    fn invalid_configs() {
        assert!(ScatteringConfig::at_energy(0.0).is_err());
        let bad = ScatteringConfig {
            mass_ratio: 1.0,
            ..ScatteringConfig::default()
        };
        assert!(bad.validate().is_err());
        let c = constants();
        assert!(diff_cross_section_numeric(&ScatteringConfig::default(), 4.0, &c).is_err());
    }
}
