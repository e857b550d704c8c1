//! Drop experiments built from the lower layers: two-mass Galileo pairs,
//! gravity versus accelerated-frame comparisons, mass and state sweeps, and
//! pure-versus-mixture cats.
//!
//! Each evaluated point is independent; points run on a bounded rayon pool and
//! the report is sorted afterwards so its content does not depend on
//! completion order.

pub mod config;
pub mod fit;
pub mod report;
pub mod validation;

use rayon::prelude::*;

pub use config::{ExperimentConfig, GridSettings, ParticleConfig, SolverSettings, SweepSettings};
pub use fit::{fit_power_law, PowerLawFit};
pub use report::{CurrentStats, DistanceRecord, ExperimentReport, Manifest, RunRecord, Snapshots};

use crate::error::{Error, Result};
use crate::evolve::{auto_grid, split_step_evolve, EvolutionResult, LinearPotentialParams, SplitStepOptions};
use crate::grid::SpatialGrid;
use crate::prepare::{check_matched, match_second_particle};
use crate::states::{analytic_moments, branch_weights, branches, build_wavefunction, mixture_moments, WavepacketSpec};
use crate::tof::{
    crossing_from_moments, current_tof_distribution, distribution_distance, ehrenfest_tof, epsilon_factor, moment_crossing_time,
    semiclassical_sigma_tof, sigma_full_from_moments, TofDistribution, EXTENDED_WINDOW_SIGMAS,
};
use report::run_digest;

/// Relative accuracy of solver-derived mean arrival times at the default step.
pub const SOLVER_REL_TOL: f64 = 1e-4;
/// L1 bound between gravity and accelerated-frame distributions.
pub const EQUIVALENCE_L1: f64 = 1e-10;
/// Minimum number of points in a mass sweep.
pub const MIN_SWEEP_POINTS: usize = 5;

fn manifest(config: &ExperimentConfig) -> Manifest {
    Manifest {
        config_digest: config.digest(),
        unit: config.unit,
        solver: config.solver.clone(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        threads: config.threads,
    }
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))
}

/// Outcome of one spectral run with its arrival distribution.
pub struct Simulation {
    pub result: EvolutionResult,
    pub distribution: TofDistribution,
    pub t_solver: f64,
}

/// Evolves `spec` with a detector trace long enough for the widened arrival window.
pub fn simulate(
    spec: &WavepacketSpec,
    params: &LinearPotentialParams,
    config: &ExperimentConfig,
    dt: f64,
    t_final: f64,
    grid: Option<&SpatialGrid>,
) -> Result<Simulation> {
    let unit = &config.unit;
    let z_d = config.z_detector;
    let grid = match (grid, &config.grid) {
        (Some(g), _) => g.clone(),
        (None, Some(g)) => g.grid()?,
        (None, None) => auto_grid(spec, params, t_final, Some(z_d), unit)?,
    };
    let field = build_wavefunction(spec, &grid)?;
    let n_steps = (t_final / dt).ceil() as usize;
    let options = SplitStepOptions {
        snapshot_stride: config.solver.snapshot_stride,
        store_fields: config.solver.store_fields,
        detector: Some(z_d),
    };
    let result = split_step_evolve(&field, params, dt, n_steps, &options, unit)?;
    let distribution = current_tof_distribution(&result, z_d, unit)?;
    let t_solver = moment_crossing_time(&result, z_d)?;
    Ok(Simulation {
        result,
        distribution,
        t_solver,
    })
}

/// Step size and run length that cover `spec`'s widened arrival window.
pub fn run_length(
    spec: &WavepacketSpec,
    params: &LinearPotentialParams,
    config: &ExperimentConfig,
) -> Result<(f64, f64)> {
    let t = ehrenfest_tof(spec, params, config.z_detector, &config.unit)?;
    let sigma = sigma_full_from_moments(&analytic_moments(spec, &config.unit), params, config.z_detector)?;
    let dt = config.solver.dt.unwrap_or(t / config.solver.steps_per_fall as f64);
    Ok((dt, t + (EXTENDED_WINDOW_SIGMAS + 1.0) * sigma))
}

/// Analytic estimators for one point, plus the solver when `simulate` is set.
pub fn evaluate_point(
    label: &str,
    spec: &WavepacketSpec,
    params: &LinearPotentialParams,
    config: &ExperimentConfig,
    simulate_run: bool,
) -> Result<PointOutput> {
    let unit = &config.unit;
    let t_ehrenfest = ehrenfest_tof(spec, params, config.z_detector, unit)?;
    let sigma = semiclassical_sigma_tof(spec, params, config.z_detector, unit)?;
    let mut record = RunRecord {
        digest: run_digest(&config.digest(), label),
        label: label.to_string(),
        mode: params.mode,
        spec: (*spec).into(),
        mass: params.mass,
        field_strength: params.field_strength,
        mean_p0: analytic_moments(spec, unit).mean_p,
        epsilon: epsilon_factor(spec, unit),
        t_ehrenfest,
        sigma_full: sigma.full,
        sigma_asymptotic: sigma.asymptotic,
        t_solver: None,
        current: None,
    };
    if !simulate_run {
        return Ok(PointOutput {
            record,
            distribution: None,
            snapshots: None,
        });
    }
    let (dt, t_final) = run_length(spec, params, config)?;
    let sim = simulate(spec, params, config, dt, t_final, None)?;
    record.t_solver = Some(sim.t_solver);
    record.current = Some((&sim.distribution).into());
    let snapshots = snapshots_of(label, &sim.result);
    Ok(PointOutput {
        record,
        distribution: Some(sim.distribution),
        snapshots,
    })
}

pub struct PointOutput {
    pub record: RunRecord,
    pub distribution: Option<TofDistribution>,
    pub snapshots: Option<Snapshots>,
}

fn snapshots_of(label: &str, result: &EvolutionResult) -> Option<Snapshots> {
    result.fields.as_ref().map(|f| Snapshots {
        label: label.to_string(),
        times: result.times.clone(),
        fields: f.clone(),
    })
}

type Point = (String, WavepacketSpec, LinearPotentialParams, bool);

fn evaluate_all(config: &ExperimentConfig, points: Vec<Point>, report: &mut ExperimentReport) -> Result<()> {
    let results: Vec<Result<PointOutput>> = pool(config.threads)?.install(|| {
        points
            .par_iter()
            .map(|(label, spec, params, sim)| evaluate_point(label, spec, params, config, *sim))
            .collect()
    });
    for r in results {
        let PointOutput {
            record,
            distribution,
            snapshots,
        } = r?;
        if let Some(c) = &record.current {
            if c.flux_warning {
                report.warnings.push(format!(
                    "{}: arrival window captured only {:.6} of the downward flux",
                    record.label, c.captured_fraction
                ));
            }
        }
        if let Some(d) = distribution {
            report.distributions.push((record.label.clone(), d));
        }
        report.snapshots.extend(snapshots);
        report.records.push(record);
    }
    Ok(())
}

fn distance_between(report: &ExperimentReport, a: &str, b: &str) -> Result<DistanceRecord> {
    let missing = |l: &str| Error::Config(format!("no distribution recorded for '{l}'"));
    let da = report.distribution(a).ok_or_else(|| missing(a))?;
    let db = report.distribution(b).ok_or_else(|| missing(b))?;
    Ok(DistanceRecord {
        first: a.to_string(),
        second: b.to_string(),
        distance: distribution_distance(da, db)?,
    })
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Two particles dropped from matched preparations.
pub fn run_galileo_pair(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    if config.particles.len() != 2 {
        return Err(Error::Config(format!(
            "a Galileo drop needs exactly two particles, got {}",
            config.particles.len()
        )));
    }
    let unit = &config.unit;
    let mut report = ExperimentReport::new("drop", manifest(config));
    let (p1, p2) = (&config.particles[0], &config.particles[1]);
    let mut spec2 = p2.spec;
    let check = check_matched(&p1.spec, &p1.mass, &spec2, &p2.mass, config.match_tolerance, unit);
    report.flags.insert("auto_matched".into(), false);
    if !check.matched {
        if !config.auto_match {
            return Err(Error::Config(format!(
                "preparation not matched (position residual {}, velocity residual {})",
                check.position_residual, check.velocity_residual
            )));
        }
        spec2 = match_second_particle(&p1.spec, &p1.mass, &p2.spec, &p2.mass, unit)?;
        report.flags.insert("auto_matched".into(), true);
    }
    let after = check_matched(&p1.spec, &p1.mass, &spec2, &p2.mass, config.match_tolerance, unit);
    report.flags.insert("matched".into(), after.matched);
    report.values.insert("position_residual".into(), after.position_residual);
    report.values.insert("velocity_residual".into(), after.velocity_residual);

    let points = vec![
        ("particle-1".to_string(), p1.spec, config.gravity(p1.mass)?, true),
        ("particle-2".to_string(), spec2, config.gravity(p2.mass)?, true),
    ];
    evaluate_all(config, points, &mut report)?;
    let r1 = report.record("particle-1").cloned().expect("evaluated");
    let r2 = report.record("particle-2").cloned().expect("evaluated");

    let ratio_equal = rel_close(
        r1.mass.inertial_over_gravitational(),
        r2.mass.inertial_over_gravitational(),
        1e-12,
    );
    let mean_equal = rel_close(r1.t_ehrenfest, r2.t_ehrenfest, 1e-9);
    report.flags.insert("ratio_equal".into(), ratio_equal);
    report.flags.insert("mean_tof_equal".into(), mean_equal);
    report.flags.insert("universality_consistent".into(), ratio_equal == mean_equal);
    report.flags.insert(
        "sigma_equal".into(),
        rel_close(r1.sigma_asymptotic, r2.sigma_asymptotic, 1e-12),
    );
    report.values.insert("t_ehrenfest_ratio".into(), r2.t_ehrenfest / r1.t_ehrenfest);
    report.values.insert("sigma_asymptotic_ratio".into(), r2.sigma_asymptotic / r1.sigma_asymptotic);
    if let (Some(c1), Some(c2)) = (&r1.current, &r2.current) {
        report.values.insert("current_mean_diff".into(), c2.mean_t - c1.mean_t);
        report.values.insert("current_std_ratio".into(), c2.std_t / c1.std_t);
        report.flags.insert(
            "current_mean_equal".into(),
            (c1.mean_t - c2.mean_t).abs() <= SOLVER_REL_TOL * (c1.mean_t + c2.mean_t),
        );
    }
    report.distances.push(distance_between(&report, "particle-1", "particle-2")?);
    report.sort();
    Ok(report)
}

/// Gravity versus accelerated-frame arrival distributions for every particle.
pub fn run_equivalence_test(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let mut report = ExperimentReport::new("ep-test", manifest(config));
    let mut cases: Vec<(String, ParticleConfig)> = config
        .particles
        .iter()
        .enumerate()
        .map(|(i, p)| (format!("p{}", i + 1), p.clone()))
        .collect();
    if let Some(sweep) = &config.sweep {
        let base = &config.particles[0];
        for preset in &sweep.states {
            cases.push((
                preset.name().to_string(),
                ParticleConfig {
                    spec: preset.spec(base.spec.z0(), base.spec.delta0())?,
                    mass: base.mass,
                },
            ));
        }
    }
    if config.frame_acceleration != config.unit.g {
        report.warnings.push(format!(
            "frame acceleration {} differs from g = {}; distributions are expected to differ",
            config.frame_acceleration, config.unit.g
        ));
    }
    let mut points = Vec::new();
    for (label, p) in &cases {
        if p.mass.m_inertial != p.mass.m_gravitational {
            report.warnings.push(format!(
                "{label}: m_i != m_g; the accelerated-frame comparison is exploratory"
            ));
        }
        points.push((format!("{label}-gravity"), p.spec, config.gravity(p.mass)?, true));
        points.push((format!("{label}-accelerated"), p.spec, config.accelerated(p.mass)?, true));
    }
    evaluate_all(config, points, &mut report)?;
    let mut all = true;
    let mut worst: f64 = 0.0;
    for (label, _) in &cases {
        let d = distance_between(&report, &format!("{label}-gravity"), &format!("{label}-accelerated"))?;
        let ok = d.distance.l1 <= EQUIVALENCE_L1;
        worst = worst.max(d.distance.l1);
        all &= ok;
        report.flags.insert(format!("equivalent_{label}"), ok);
        report.distances.push(d);
    }
    report.flags.insert("equivalent".into(), all);
    report.values.insert("max_l1".into(), worst);
    report.sort();
    Ok(report)
}

/// Sweeps the gravitational mass, the state family and (for cats) the phase.
pub fn run_mass_sweep(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let sweep = config.sweep.clone().unwrap_or_default();
    if sweep.masses.len() < MIN_SWEEP_POINTS {
        return Err(Error::Config(format!(
            "mass sweep needs at least {MIN_SWEEP_POINTS} values, got {}",
            sweep.masses.len()
        )));
    }
    let lo = sweep.masses.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = sweep.masses.iter().cloned().fold(0.0, f64::max);
    if hi / lo < 10.0 {
        return Err(Error::Config(format!(
            "mass sweep must span at least one decade, got [{lo}, {hi}]"
        )));
    }
    let base = &config.particles[0];
    let m_i = base.mass.m_inertial;
    let mut report = ExperimentReport::new("sweep", manifest(config));
    let mut points = Vec::new();
    for &m_g in &sweep.masses {
        let mass = crate::units::MassPair::new(m_i, m_g)?;
        points.push((format!("mg={m_g}"), base.spec, config.gravity(mass)?, sweep.simulate));
    }
    for preset in &sweep.states {
        let spec = preset.spec(base.spec.z0(), base.spec.delta0())?;
        points.push((format!("state={}", preset.name()), spec, config.gravity(base.mass)?, false));
    }
    if !sweep.thetas.is_empty() {
        if base.spec.kind() != crate::states::StateKind::Cat {
            return Err(Error::Config("a theta sweep needs a cat as the first particle".into()));
        }
        for &theta in &sweep.thetas {
            points.push((
                format!("theta={theta}"),
                base.spec.with_theta(theta)?,
                config.gravity(base.mass)?,
                false,
            ));
        }
    }
    evaluate_all(config, points, &mut report)?;

    let mass_records: Vec<&RunRecord> = sweep
        .masses
        .iter()
        .map(|m| report.record(&format!("mg={m}")).expect("evaluated"))
        .collect();
    let m_g: Vec<f64> = mass_records.iter().map(|r| r.mass.m_gravitational).collect();
    let ratio: Vec<f64> = mass_records.iter().map(|r| r.mass.inertial_over_gravitational()).collect();
    let sigma: Vec<f64> = mass_records.iter().map(|r| r.sigma_asymptotic).collect();
    let tof: Vec<f64> = mass_records.iter().map(|r| r.t_ehrenfest).collect();
    let mut fits = vec![
        fit_power_law("sigma_asymptotic_vs_mg", &m_g, &sigma)?,
        fit_power_law("t_ehrenfest_vs_ratio", &ratio, &tof)?,
    ];
    if sweep.simulate {
        let current: Vec<f64> = mass_records
            .iter()
            .map(|r| r.current.map(|c| c.mean_t).unwrap_or(f64::NAN))
            .collect();
        let std: Vec<f64> = mass_records
            .iter()
            .map(|r| r.current.map(|c| c.std_t).unwrap_or(f64::NAN))
            .collect();
        fits.push(fit_power_law("current_mean_vs_ratio", &ratio, &current)?);
        fits.push(fit_power_law("current_std_vs_mg", &m_g, &std)?);
    }
    for preset in &sweep.states {
        let r = report.record(&format!("state={}", preset.name())).expect("evaluated");
        report.values.insert(format!("epsilon_{}", preset.name()), r.epsilon);
    }
    report.fits = fits;
    report.sort();
    Ok(report)
}

/// Pure cat against the diagonal mixture of its two branches.
pub fn run_decoherence_comparison(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let unit = &config.unit;
    let base = &config.particles[0];
    let (w_plus, w_minus) = branch_weights(&base.spec)?;
    let (plus, minus) = branches(&base.spec)?;
    let params = config.gravity(base.mass)?;
    let mut report = ExperimentReport::new("decohere", manifest(config));

    // One step and run length for all three evolutions so their flux samples line up.
    let (dt, t_pure) = run_length(&base.spec, &params, config)?;
    let t_final = [t_pure, run_length(&plus, &params, config)?.1, run_length(&minus, &params, config)?.1]
        .into_iter()
        .fold(0.0, f64::max);

    let runs: Vec<Result<Simulation>> = pool(config.threads)?.install(|| {
        [base.spec, plus, minus]
            .par_iter()
            .map(|s| simulate(s, &params, config, dt, t_final, None))
            .collect()
    });
    let mut runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let sim_minus = runs.pop().expect("three runs");
    let sim_plus = runs.pop().expect("three runs");
    let sim_pure = runs.pop().expect("three runs");

    let labels = ["pure", "branch-plus", "branch-minus"];
    for ((label, spec), sim) in labels.iter().zip([base.spec, plus, minus]).zip([&sim_pure, &sim_plus, &sim_minus]) {
        let mut rec = evaluate_point(label, &spec, &params, config, false)?.record;
        rec.t_solver = Some(sim.t_solver);
        rec.current = Some((&sim.distribution).into());
        report.records.push(rec);
        report.distributions.push((label.to_string(), sim.distribution.clone()));
        report.snapshots.extend(snapshots_of(label, &sim.result));
    }

    let trace = |s: &Simulation| s.result.detector.clone().expect("detector recorded");
    let (tp, tm) = (trace(&sim_plus), trace(&sim_minus));
    if tp.times != tm.times {
        return Err(Error::Config("branch runs are not sampled on a common time axis".into()));
    }
    let flux: Vec<f64> = tp
        .current
        .iter()
        .zip(&tm.current)
        .map(|(a, b)| -(w_plus * a + w_minus * b))
        .collect();
    let window = (
        sim_plus.distribution.window.0.min(sim_minus.distribution.window.0),
        sim_plus.distribution.window.1.max(sim_minus.distribution.window.1),
    );
    let mixture = TofDistribution::from_flux(&tp.times, &flux, window)?;

    let mix_moments = mixture_moments(&base.spec, unit)?;
    let pure_moments = analytic_moments(&base.spec, unit);
    let rp = report.record("branch-plus").cloned().expect("recorded");
    let pure = report.record("pure").cloned().expect("recorded");
    report.records.push(RunRecord {
        digest: run_digest(&config.digest(), "mixture"),
        label: "mixture".into(),
        mean_p0: mix_moments.mean_p,
        epsilon: 1.0,
        t_ehrenfest: crossing_from_moments(&mix_moments, &params, config.z_detector)?,
        sigma_full: sigma_full_from_moments(&mix_moments, &params, config.z_detector)?,
        sigma_asymptotic: rp.sigma_asymptotic,
        t_solver: None,
        current: Some((&mixture).into()),
        ..pure.clone()
    });
    report.distributions.push(("mixture".into(), mixture.clone()));

    let branch_average = w_plus * sim_plus.distribution.mean_t + w_minus * sim_minus.distribution.mean_t;
    let pure_mean = sim_pure.distribution.mean_t;
    let tol_pure = SOLVER_REL_TOL * pure_mean;
    let tol_mix = SOLVER_REL_TOL * mixture.mean_t;
    report.values.insert("pure_mean_p0".into(), pure_moments.mean_p);
    report.values.insert("mixture_mean_p0".into(), mix_moments.mean_p);
    report.values.insert("pure_current_mean_t".into(), pure_mean);
    report.values.insert("mixture_current_mean_t".into(), mixture.mean_t);
    report.values.insert("mixture_branch_average_t".into(), branch_average);
    report.values.insert("pure_current_std_t".into(), sim_pure.distribution.std_t);
    report.values.insert("mixture_current_std_t".into(), mixture.std_t);
    report.values.insert("combined_solver_tolerance".into(), tol_pure + tol_mix);
    report.values.insert("pure_var_p".into(), pure_moments.var_p);
    report.values.insert("mixture_var_p".into(), mix_moments.var_p);
    report.flags.insert(
        "mean_tof_differs".into(),
        (pure_mean - mixture.mean_t).abs() > 5.0 * (tol_pure + tol_mix),
    );
    report.flags.insert(
        "mixture_is_branch_average".into(),
        (mixture.mean_t - branch_average).abs() <= tol_mix,
    );
    report.distances.push(distance_between(&report, "pure", "mixture")?);
    report.sort();
    Ok(report)
}
