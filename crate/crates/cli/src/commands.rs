//! Subcommand implementations. Each returns the table and metadata to write.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use atomcoh::density::purity;
use atomcoh::momentum::{electron_limit, gaussian_limit, MomentumDistribution, MomentumProfile};
use atomcoh::scattering::{
    angular_scan, anomalous_fraction, check_conditions, ConditionReport, ASYMPTOTIC_MIN_Q,
};
use atomcoh::twoslit::{schmidt_overlap, scan_screen};
use atomcoh::{CoherenceKernel, GaussianPacket, ScanMethod, ScatteringConfig, TwoSlitConfig};

use crate::config::{RunConfig, Subcommand};
use crate::error::CliError;
use crate::output::{Cell, Output};

const BARN: f64 = 1e-28;

pub fn run(config: &RunConfig) -> Result<Output, CliError> {
    match config.subcommand {
        Subcommand::Purity => run_purity(config),
        Subcommand::Momentum => run_momentum(config),
        Subcommand::TwoSlit => run_twoslit(config),
        Subcommand::XSection => run_xsection(config),
        Subcommand::Conditions => run_conditions(config),
    }
}

fn run_purity(config: &RunConfig) -> Result<Output, CliError> {
    let (lo, hi, n) = (config.number("z_min"), config.number("z_max"), config.count("points"));
    let grid: Vec<f64> = (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect();
    let values = grid
        .par_iter()
        .map(|&z| purity(z))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Output {
        columns: vec!["z", "purity", "purity_over_z3"],
        rows: grid
            .iter()
            .zip(&values)
            .map(|(&z, &p)| vec![z.into(), p.into(), (p / z.powi(3)).into()])
            .collect(),
        meta: vec![(
            "quadrature".into(),
            "adaptive Gauss-Kronrod 7/15, rel_tol 1e-11".into(),
        )],
        summary: Some(json!({
            "small_z_coefficient": atomcoh::density::purity_small_z_coefficient(),
        })),
        failures: Vec::new(),
    })
}

fn species_kernel(name: &str) -> CoherenceKernel {
    match name {
        "helium" => CoherenceKernel::helium(),
        _ => CoherenceKernel::hydrogen(),
    }
}

fn run_momentum(config: &RunConfig) -> Result<Output, CliError> {
    let z0 = config.number("z0");
    let n = config.count("points");
    let q_max = config.number("q_max");
    let kernel = species_kernel(config.text("species"));
    let grid: Vec<f64> = (0..n).map(|i| q_max * i as f64 / (n - 1) as f64).collect();
    let dist = MomentumDistribution::tabulate(kernel, z0, &grid)?;
    let norm = MomentumProfile::new(kernel, z0)?.normalization()?;
    let delta = 1.0 / z0;
    let rows = grid
        .iter()
        .zip(&dist.values)
        .map(|(&q, &d)| {
            Ok(vec![
                Cell::from(q),
                d.into(),
                gaussian_limit(q, delta)?.into(),
                electron_limit(q)?.into(),
            ])
        })
        .collect::<Result<Vec<_>, atomcoh::Error>>()?;
    Ok(Output {
        columns: vec!["q", "density", "gaussian_limit", "electron_limit"],
        rows,
        meta: vec![
            ("units".into(), "q in hbar/a_B, densities in a_B^3/hbar^3".into()),
            (
                "electron_limit".into(),
                "hydrogen 1s distribution, for reference with either species".into(),
            ),
        ],
        summary: Some(json!({ "normalization": norm })),
        failures: Vec::new(),
    })
}

fn run_twoslit(config: &RunConfig) -> Result<Output, CliError> {
    let c = &config.constants;
    let mass = c.hydrogen_mass_au();
    let delta = config.number("delta_ab");
    let t0 = match config.optional("t0_s") {
        Some(seconds) => seconds / c.atomic_time(),
        None => config.number("spreading") * 2.0 * mass * delta * delta,
    };
    let mut slits = TwoSlitConfig::symmetric(
        config.number("separation_ab"),
        delta,
        mass,
        config.number("p0_au"),
        t0,
    )?;
    let a = config.number("amp_a");
    slits.amp1 = Complex64::new(a, 0.0);
    slits.amp2 = Complex64::from_polar((1.0 - a * a).max(0.0).sqrt(), config.number("phase_rad"));
    slits.validate()?;
    let period = slits.expected_fringe_period()?;
    let scan = scan_screen(&slits, config.count("points"), 0.5 * config.number("span_periods") * period)?;
    let rows = scan
        .offsets
        .iter()
        .zip(scan.coherent.iter().zip(&scan.decohered))
        .map(|(&u, (&coh, &dec))| vec![u.into(), coh.into(), dec.into()])
        .collect();
    let width = slits.packets()?.0.width(t0);
    Ok(Output {
        columns: vec!["screen_coordinate", "coherent_P", "decohered_P"],
        rows,
        meta: vec![(
            "units".into(),
            "screen coordinate in a_B from the midline, densities in a_B^-3".into(),
        )],
        summary: Some(json!({
            "visibility_coherent": scan.visibility_coherent,
            "visibility_decohered": scan.visibility_decohered,
            "schmidt_overlap": schmidt_overlap(&slits)?,
            "fringe_period_ab": period,
            "envelope_width_ab": width,
            "t0_s": t0 * c.atomic_time(),
            "spreading": slits.spreading(),
        })),
        failures: Vec::new(),
    })
}

fn scattering_config(config: &RunConfig) -> Result<ScatteringConfig, CliError> {
    let mut s = ScatteringConfig {
        energy_ev: config.number("energy_ev"),
        nucleus_size_fm: config.number("nucleus_size_fm"),
        ..ScatteringConfig::default()
    };
    if config.subcommand == Subcommand::XSection {
        s.z0 = config.number("z0");
        s.scatt_length_fm = config.number("scatt_length_fm");
        s.mass_ratio = config.number("mass_ratio");
    }
    s.validate()?;
    Ok(s)
}

fn conditions_json(r: &ConditionReport) -> serde_json::Value {
    serde_json::to_value(r).expect("condition report serializes")
}

fn run_xsection(config: &RunConfig) -> Result<Output, CliError> {
    let c = &config.constants;
    let s = scattering_config(config)?;
    let method: ScanMethod = config.text("method").parse()?;
    let delta = if s.z0 > 0.0 { 1.0 / s.z0 } else { config.number("delta_ab") };
    let packet = GaussianPacket::at_rest(delta, c.alpha_mass_au())?;
    let report = check_conditions(&s, &packet, c)?;
    let table = angular_scan(&s, config.count("points"), method, c)?;
    let rows = (0..table.theta_grid.len())
        .map(|i| {
            vec![
                table.theta_grid[i].into(),
                table.dsigma_numeric[i].map(|v| v / BARN).into(),
                table.dsigma_asymptotic[i].map(|v| v / BARN).into(),
                table.anomalous_fraction[i].into(),
            ]
        })
        .collect();
    let mut summary = json!({
        "q": table.q,
        "conditions": conditions_json(&report),
        "h0_over_q2": anomalous_fraction(&s, 0.0, c)?,
        "hpi_over_q2": anomalous_fraction(&s, PI, c)?,
        "max_relative_deviation": table.max_relative_deviation(),
        "failures": table.failures.len(),
    });
    if table.q < ASYMPTOTIC_MIN_Q {
        summary["warning"] = json!(format!(
            "q = {:.3} is below {ASYMPTOTIC_MIN_Q}; the asymptotic formula is unreliable",
            table.q
        ));
    }
    Ok(Output {
        columns: vec!["theta_rad", "dsigma_numeric", "dsigma_asymptotic", "anomalous_fraction"],
        rows,
        meta: vec![
            ("units".into(), "cross-sections in barn/sr, lab frame".into()),
            (
                "quadrature".into(),
                "k' integral rel_tol 1e-11 with graded breakpoints at the quasi-elastic peak; theta = 0 evaluated at 1e-6 rad".into(),
            ),
            ("asymptotic_mass_ratio".into(), "4".into()),
            ("condition_packet_delta_ab".into(), format!("{delta}")),
        ],
        summary: Some(summary),
        failures: table
            .failures
            .iter()
            .map(|f| format!("theta[{}] = {}: {}", f.index, f.theta, f.message))
            .collect(),
    })
}

fn run_conditions(config: &RunConfig) -> Result<Output, CliError> {
    let c = &config.constants;
    let s = scattering_config(config)?;
    let mass = match config.text("species") {
        "hydrogen" => c.hydrogen_mass_au(),
        _ => c.alpha_mass_au(),
    };
    let packet = GaussianPacket::at_rest(config.number("delta_ab"), mass)?;
    let r = check_conditions(&s, &packet, c)?;
    let rows = [
        ("born_oppenheimer", r.born_oppenheimer),
        ("almost_diagonal", r.almost_diagonal),
        ("decoherence", r.decoherence),
    ]
    .into_iter()
    .map(|(name, m)| vec![name.into(), m.value.into(), m.threshold.into(), m.margin.into()])
    .collect();
    Ok(Output {
        columns: vec!["condition", "value_m_per_s", "threshold_m_per_s", "margin"],
        rows,
        meta: vec![(
            "electron_velocity_scale_m_per_s".into(),
            format!("{}", c.electron_velocity_scale()),
        )],
        summary: Some(json!({
            "energy_ev": s.energy_ev,
            "q": r.q,
            "neutron_speed_m_per_s": r.neutron_speed,
            "boundary_energy_ev": r.boundary_energy_ev,
            "decoherence_margin": r.decoherence.margin,
            "conditions": conditions_json(&r),
        })),
        failures: Vec::new(),
    })
}
