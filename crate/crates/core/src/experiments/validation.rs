//! Analytic-versus-numeric oracle table behind the `validate` command.

use std::f64::consts::{E, FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ParticleConfig, SweepSettings};
use super::{run_equivalence_test, run_mass_sweep, run_length, simulate};
use crate::error::Result;
use crate::evolve::{auto_grid, exact_wavefunction, split_step_evolve, LinearPotentialParams, SplitStepOptions};
use crate::grid::SpatialGrid;
use crate::prepare::{check_matched, match_second_particle};
use crate::states::{analytic_moments, build_wavefunction, mixture_moments, numeric_moments, StatePreset, WavepacketSpec};
use crate::tof::{ehrenfest_tof, epsilon_factor, semiclassical_sigma_tof};
use crate::units::{MassPair, UnitSystem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub name: String,
    pub value: f64,
    pub expected: f64,
    /// Absolute tolerance, or an upper bound when `expected` is NaN.
    pub tolerance: f64,
    pub passed: bool,
}

impl OracleCheck {
    fn close(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        OracleCheck {
            name: name.into(),
            value,
            expected,
            tolerance,
            passed: (value - expected).abs() <= tolerance,
        }
    }

    fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        OracleCheck {
            name: name.into(),
            value,
            expected: f64::NAN,
            tolerance: bound,
            passed: value <= bound,
        }
    }
}

/// Parity-cat spread factor for touching peaks, `sqrt((e-1)/(e+1))`.
pub fn male_epsilon() -> f64 {
    ((E - 1.0) / (E + 1.0)).sqrt()
}

fn quadrature_epsilon(spec: &WavepacketSpec, unit: &UnitSystem) -> Result<f64> {
    let grid = SpatialGrid::new(spec.z0() - 24.0 * spec.delta0(), spec.z0() + 24.0 * spec.delta0(), 1024)?;
    let m = numeric_moments(&build_wavefunction(spec, &grid)?, unit)?;
    let d0 = spec.delta0();
    Ok((m.var_p / (unit.hbar * unit.hbar / (2.0 * d0 * d0))).sqrt())
}

fn split_step_error(
    spec: &WavepacketSpec,
    params: &LinearPotentialParams,
    t: f64,
    steps: usize,
    grid: &SpatialGrid,
    unit: &UnitSystem,
) -> Result<f64> {
    let field = build_wavefunction(spec, grid)?;
    let opts = SplitStepOptions::default();
    let r = split_step_evolve(&field, params, t / steps as f64, steps, &opts, unit)?;
    r.final_field.l2_distance(&exact_wavefunction(spec, params, t, grid, unit)?)
}

/// Runs every oracle check in unit `unit`.
pub fn run_validation(unit: &UnitSystem) -> Result<Vec<OracleCheck>> {
    let mut out = Vec::new();
    let d0 = unit.length_ref;
    let eps_m = male_epsilon();

    for preset in StatePreset::ALL {
        let spec = preset.spec(4.0 * d0, d0)?;
        let expected = match preset {
            StatePreset::Male => eps_m,
            StatePreset::Female => 1.0 / eps_m,
            // Balanced quarter-phase cat: <p> = hbar/(e Delta0) and no overlap term.
            StatePreset::YurkeStoler => (1.0 - 2.0 * (-2.0f64).exp()).sqrt(),
            StatePreset::Gaussian => 1.0,
        };
        out.push(OracleCheck::close(
            format!("epsilon {}", preset.name()),
            epsilon_factor(&spec, unit),
            expected,
            1e-9,
        ));
        out.push(OracleCheck::close(
            format!("epsilon {} by quadrature", preset.name()),
            quadrature_epsilon(&spec, unit)?,
            expected,
            1e-9,
        ));
    }

    let z0 = 2.0 * d0;
    let spec = WavepacketSpec::gaussian(z0, d0)?;
    let fall = (2.0 * z0 / unit.g).sqrt();
    for ratio in [1.0, 2.0, 4.0] {
        let params = LinearPotentialParams::gravity(MassPair::new(ratio, 1.0)?, unit.g)?;
        out.push(OracleCheck::close(
            format!("ehrenfest tof, m_i/m_g = {ratio}"),
            ehrenfest_tof(&spec, &params, 0.0, unit)?,
            fall * ratio.sqrt(),
            1e-12 * fall * ratio.sqrt(),
        ));
    }

    let mut config = ExperimentConfig::minimal();
    config.unit = *unit;
    config.frame_acceleration = unit.g;
    config.particles[0].spec = spec;
    let params = config.gravity(MassPair::equal(1.0)?)?;
    let (dt, t_final) = run_length(&spec, &params, &config)?;
    let sim = simulate(&spec, &params, &config, dt, t_final, None)?;
    out.push(OracleCheck::close(
        "split-step mean crossing / ehrenfest tof",
        sim.t_solver / fall,
        1.0,
        1e-4,
    ));

    let far = WavepacketSpec::gaussian(100.0 * d0, d0)?;
    let sigma = semiclassical_sigma_tof(&far, &params, 0.0, unit)?;
    let light = LinearPotentialParams::gravity(MassPair::new(0.1, 1.0)?, unit.g)?;
    let sigma_light = semiclassical_sigma_tof(&far, &light, 0.0, unit)?;
    let limit = FRAC_1_SQRT_2 * unit.hbar / (d0 * unit.g);
    out.push(OracleCheck::close("sigma_full / asymptote at z0 = 100", sigma.full / limit, 1.0, 0.01));
    out.push(OracleCheck::close(
        "sigma_asymptotic change for m_i / 10",
        sigma_light.asymptotic - sigma.asymptotic,
        0.0,
        0.0,
    ));
    out.push(OracleCheck::close(
        "sigma_full relative change for m_i / 10",
        sigma_light.full / sigma.full - 1.0,
        0.0,
        0.01,
    ));

    let mut sweep = config.clone();
    sweep.sweep = Some(SweepSettings {
        masses: vec![1.0, 2.0, 4.0, 8.0, 16.0],
        states: Vec::new(),
        thetas: Vec::new(),
        simulate: false,
    });
    let report = run_mass_sweep(&sweep)?;
    for (fit, expected) in [("sigma_asymptotic_vs_mg", -1.0), ("t_ehrenfest_vs_ratio", 0.5)] {
        let f = report.fits.iter().find(|f| f.name == fit).expect("fit recorded");
        out.push(OracleCheck::close(format!("sweep exponent {fit}"), f.exponent, expected, 0.01));
    }

    let mut ep = config.clone();
    ep.particles = vec![ParticleConfig {
        spec: WavepacketSpec::yurke_stoler(z0 + 2.0 * d0, d0, d0)?,
        mass: MassPair::equal(1.0)?,
    }];
    ep.particles.insert(0, config.particles[0].clone());
    let report = run_equivalence_test(&ep)?;
    out.push(OracleCheck::at_most("gravity vs accelerated frame L1", report.values["max_l1"], 1e-10));

    let ys = WavepacketSpec::yurke_stoler(4.0 * d0, d0, d0)?;
    for theta in [0.0, PI] {
        let s = ys.with_theta(theta)?;
        let grid = SpatialGrid::new(s.z0() - 24.0 * d0, s.z0() + 24.0 * d0, 1024)?;
        let m = numeric_moments(&build_wavefunction(&s, &grid)?, unit)?;
        out.push(OracleCheck::close(format!("<p> by quadrature at theta = {theta}"), m.mean_p, 0.0, 1e-12));
    }
    let grid = SpatialGrid::new(ys.z0() - 24.0 * d0, ys.z0() + 24.0 * d0, 1024)?;
    let numeric = numeric_moments(&build_wavefunction(&ys, &grid)?, unit)?;
    let analytic = analytic_moments(&ys, unit);
    out.push(OracleCheck::close("cat <p> analytic vs quadrature", numeric.mean_p, analytic.mean_p, 1e-10));
    out.push(OracleCheck::close("cat var_z analytic vs quadrature", numeric.var_z, analytic.var_z, 1e-10));
    out.push(OracleCheck::close("mixture <p>", mixture_moments(&ys, unit)?.mean_p, 0.0, 1e-12));

    let t = 2.0;
    let grid = auto_grid(&spec, &params, t, None, unit)?;
    let field = build_wavefunction(&spec, &grid)?;
    let n0 = field.norm();
    let long = split_step_evolve(&field, &params, t / 10_000.0, 10_000, &SplitStepOptions::default(), unit)?;
    out.push(OracleCheck::at_most("norm drift over 1e4 steps", (long.final_field.norm() - n0).abs(), 1e-10));
    let coarse = split_step_error(&spec, &params, t, 4096, &grid, unit)?;
    let fine = split_step_error(&spec, &params, t, 8192, &grid, unit)?;
    out.push(OracleCheck::close("Strang order ratio", coarse / fine, 4.0, 0.5));
    out.push(OracleCheck::at_most("split-step vs exact L2 at refined dt", fine, 1e-8));

    let cat = WavepacketSpec::male(4.0 * d0, d0, d0)?;
    let m1 = MassPair::equal(1.0)?;
    let m2 = MassPair::new(0.8, 0.7)?;
    let matched = match_second_particle(&cat, &m1, &ys, &m2, unit)?;
    let r = check_matched(&cat, &m1, &matched, &m2, 1e-9, unit);
    out.push(OracleCheck::at_most(
        "matched preparation residual",
        r.position_residual.max(r.velocity_residual),
        1e-9,
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn male_epsilon_value() {
        assert!((male_epsilon() - 0.6797919955839504).abs() < 1e-15);
    }

    #[test]
    fn default_validation_passes() {
        let checks = run_validation(&UnitSystem::default()).unwrap();
        let failed: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
        assert!(failed.is_empty(), "{failed:?}");
    }
}
