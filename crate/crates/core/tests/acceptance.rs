//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Run with
//! `cargo test -p qfall --release --test acceptance`.

use std::f64::consts::{E, FRAC_1_SQRT_2, PI};
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qfall::evolve::{auto_grid, split_step_evolve, LinearPotentialParams, SplitStepOptions};
use qfall::experiments::{
    run_decoherence_comparison, run_equivalence_test, run_length, run_mass_sweep, simulate, ExperimentConfig,
    SweepSettings, SOLVER_REL_TOL,
};
use qfall::field::GridField;
use qfall::grid::SpatialGrid;
use qfall::prepare::{check_matched, match_second_particle, max_velocity};
use qfall::states::{analytic_moments, build_wavefunction, mixture_moments, StatePreset, WavepacketSpec};
use qfall::tof::{ehrenfest_tof, epsilon_factor, semiclassical_sigma_tof};
use qfall::units::{MassPair, UnitSystem};
use qfall::Error;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Moments by direct trapezoid quadrature of the unnormalized superposition and
/// its analytic derivative.
struct Quadrature {
    mean_z: f64,
    mean_p: f64,
    var_p: f64,
}

fn quadrature(spec: &WavepacketSpec, hbar: f64) -> Quadrature {
    let (cp, cm) = spec.coefficients();
    let (z0, d, d0) = (spec.z0(), spec.delta(), spec.delta0());
    let lo = z0 - d - 20.0 * d0;
    let hi = z0 + d + 20.0 * d0;
    let n = 40_001;
    let h = (hi - lo) / (n - 1) as f64;
    let (mut norm, mut z1, mut p1, mut p2) = (0.0, 0.0, 0.0, 0.0);
    for j in 0..n {
        let z = lo + h * j as f64;
        let mut psi = Complex64::new(0.0, 0.0);
        let mut dpsi = Complex64::new(0.0, 0.0);
        for (c, u) in [(cp, z - z0 + d), (cm, z - z0 - d)] {
            let g = (-u * u / (2.0 * d0 * d0)).exp();
            psi += c * g;
            dpsi += c * (-u / (d0 * d0)) * g;
        }
        let w = if j == 0 || j == n - 1 { 0.5 * h } else { h };
        let rho = psi.norm_sqr();
        norm += w * rho;
        z1 += w * z * rho;
        p1 += w * hbar * (psi.conj() * dpsi).im;
        p2 += w * hbar * hbar * dpsi.norm_sqr();
    }
    let mean_p = p1 / norm;
    Quadrature {
        mean_z: z1 / norm,
        mean_p,
        var_p: p2 / norm - mean_p * mean_p,
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let unit = UnitSystem::default();
    let root = ((E - 1.0) / (E + 1.0)).sqrt();
    let mut worst: f64 = 0.0;
    for (preset, expected) in [
        (StatePreset::Gaussian, 1.0),
        (StatePreset::Male, root),
        (StatePreset::Female, 1.0 / root),
    ] {
        let spec = preset.spec(5.0, 1.0).map_err(|e| e.to_string())?;
        let q = quadrature(&spec, unit.hbar);
        let eps_quad = (q.var_p / 0.5).sqrt();
        worst = worst
            .max((epsilon_factor(&spec, &unit) - expected).abs())
            .max((eps_quad - expected).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst <= 1e-9 && secs < 1.0,
        format!("max |eps - sqrt((e-1)/(e+1))^(+-1)| = {worst:.2e} (tol 1e-9), {secs:.3} s"),
    )
}

fn criterion_2() -> Outcome {
    let unit = UnitSystem::default();
    let spec = WavepacketSpec::gaussian(2.0, 1.0).map_err(|e| e.to_string())?;
    let mut config = ExperimentConfig::minimal();
    config.particles[0].spec = spec;
    let mut worst_exact: f64 = 0.0;
    let mut worst_solver: f64 = 0.0;
    for (ratio, expected) in [(1.0, 2.0), (2.0, 2.0 * 2f64.sqrt()), (4.0, 4.0)] {
        let params = LinearPotentialParams::gravity(MassPair::new(ratio, 1.0).unwrap(), 1.0).unwrap();
        let t = ehrenfest_tof(&spec, &params, 0.0, &unit).map_err(|e| e.to_string())?;
        worst_exact = worst_exact.max((t - expected).abs());
        let (dt, t_final) = run_length(&spec, &params, &config).map_err(|e| e.to_string())?;
        let sim = simulate(&spec, &params, &config, dt, t_final, None).map_err(|e| e.to_string())?;
        worst_solver = worst_solver.max((sim.t_solver - expected).abs() / expected);
    }
    check(
        worst_exact <= 1e-12 && worst_solver <= 1e-4,
        format!(
            "max |T - {{2, 2sqrt2, 4}}| = {worst_exact:.2e} (tol 1e-12); \
             solver crossing rel. error {worst_solver:.2e} (tol 1e-4)"
        ),
    )
}

fn criterion_3() -> Outcome {
    let unit = UnitSystem::default();
    let spec = WavepacketSpec::gaussian(100.0, 1.0).map_err(|e| e.to_string())?;
    let base = LinearPotentialParams::gravity(MassPair::equal(1.0).unwrap(), 1.0).unwrap();
    let light = LinearPotentialParams::gravity(MassPair::new(0.1, 1.0).unwrap(), 1.0).unwrap();
    let s = semiclassical_sigma_tof(&spec, &base, 0.0, &unit).map_err(|e| e.to_string())?;
    let s_light = semiclassical_sigma_tof(&spec, &light, 0.0, &unit).map_err(|e| e.to_string())?;
    let limit = FRAC_1_SQRT_2;
    let conv = (s.full / limit - 1.0).abs();
    let asym_change = (s_light.asymptotic - s.asymptotic).abs();
    let full_change = (s_light.full / s.full - 1.0).abs();
    check(
        conv <= 0.01 && asym_change == 0.0 && full_change < 0.01,
        format!(
            "sigma_full/limit - 1 = {conv:.2e} (tol 1e-2); m_i/10: asymptotic change {asym_change:e} (exact 0), \
             full change {full_change:.2e} (tol 1e-2)"
        ),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut config = ExperimentConfig::minimal();
    config.sweep = Some(SweepSettings {
        masses: vec![1.0, 2.0, 4.0, 8.0, 16.0],
        states: Vec::new(),
        thetas: Vec::new(),
        simulate: false,
    });
    let report = run_mass_sweep(&config).map_err(|e| e.to_string())?;
    let exponent = |name: &str| report.fits.iter().find(|f| f.name == name).map(|f| f.exponent);
    let sigma = exponent("sigma_asymptotic_vs_mg").ok_or("missing fit")?;
    let tof = exponent("t_ehrenfest_vs_ratio").ok_or("missing fit")?;
    let secs = start.elapsed().as_secs_f64();
    check(
        (sigma + 1.0).abs() <= 0.01 && (tof - 0.5).abs() <= 0.01 && secs < 60.0,
        format!("sigma slope {sigma:.6} (-1 +- 0.01), ToF slope {tof:.6} (0.5 +- 0.01), {secs:.2} s"),
    )
}

fn criterion_5() -> Outcome {
    let mut config = ExperimentConfig::minimal();
    config.particles[0].spec = WavepacketSpec::gaussian(4.0, 1.0).unwrap();
    config.sweep = Some(SweepSettings {
        masses: Vec::new(),
        states: StatePreset::ALL.to_vec(),
        thetas: Vec::new(),
        simulate: false,
    });
    config.threads = 4;
    let report = run_equivalence_test(&config).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for preset in StatePreset::ALL {
        let d = report
            .distances
            .iter()
            .find(|d| d.first == format!("{}-gravity", preset.name()))
            .ok_or("missing distance")?;
        worst = worst.max(d.distance.l1);
    }
    let mut control = config.clone();
    control.sweep = None;
    control.frame_acceleration = 2.0;
    let control = run_equivalence_test(&control).map_err(|e| e.to_string())?;
    let l1_control = control.distances[0].distance.l1;
    check(
        worst <= 1e-10 && l1_control > 0.1,
        format!("max L1 over four states = {worst:.2e} (tol 1e-10); a = 2g control L1 = {l1_control:.3} (> 0.1)"),
    )
}

fn criterion_6() -> Outcome {
    let unit = UnitSystem::default();
    let mut zero: f64 = 0.0;
    for delta in [1.0, 3.0] {
        let ys = WavepacketSpec::yurke_stoler(8.0, delta, 1.0).unwrap();
        for theta in [0.0, PI] {
            zero = zero.max(quadrature(&ys.with_theta(theta).unwrap(), unit.hbar).mean_p.abs());
        }
    }
    // Well-separated peaks, where the interference term follows sin(theta).
    let ys = WavepacketSpec::yurke_stoler(8.0, 3.0, 1.0).unwrap();
    let n = 360;
    let scan: Vec<f64> = (0..n)
        .map(|i| {
            let theta = 2.0 * PI * i as f64 / n as f64;
            analytic_moments(&ys.with_theta(theta).unwrap(), &unit).mean_p.abs()
        })
        .collect();
    let argmax = |range: std::ops::Range<usize>| {
        range
            .max_by(|&a, &b| scan[a].total_cmp(&scan[b]))
            .expect("non-empty")
    };
    let (first, second) = (argmax(0..180), argmax(180..360));
    let top = scan.iter().cloned().fold(0.0, f64::max);
    check(
        zero <= 1e-12 && first == 90 && second == 270 && scan[90] == top,
        format!("|<p>| at theta in {{0, pi}} <= {zero:.2e} (tol 1e-12); argmax indices {first}, {second} (90, 270)"),
    )
}

fn exact_gaussian(grid: &SpatialGrid, z0: f64, d0: f64, g: f64, t: f64) -> GridField {
    // Free spreading of the shifted packet times the frame phase of the field.
    let s = Complex64::new(1.0, t / (d0 * d0));
    let pre = (PI * d0 * d0).powf(-0.25) / s.sqrt();
    GridField::from_fn(grid.clone(), |z| {
        let u = z + 0.5 * g * t * t - z0;
        let free = pre * (-(u * u) / (2.0 * d0 * d0 * s)).exp();
        free * Complex64::from_polar(1.0, -g * t * z - g * g * t * t * t / 6.0)
    })
}

fn criterion_7() -> Outcome {
    let unit = UnitSystem::default();
    let spec = WavepacketSpec::gaussian(2.0, 1.0).unwrap();
    let params = LinearPotentialParams::gravity(MassPair::equal(1.0).unwrap(), 1.0).unwrap();
    let t = 2.0;
    let grid = auto_grid(&spec, &params, t, None, &unit).map_err(|e| e.to_string())?;
    let field = build_wavefunction(&spec, &grid).map_err(|e| e.to_string())?;
    let opts = SplitStepOptions::default();
    let run = |steps: usize| split_step_evolve(&field, &params, t / steps as f64, steps, &opts, &unit);
    let long = run(10_000).map_err(|e| e.to_string())?;
    let drift = (long.final_field.norm() - field.norm()).abs();
    let exact = exact_gaussian(&grid, 2.0, 1.0, 1.0, t);
    let err = |steps: usize| -> Result<f64, String> {
        run(steps)
            .and_then(|r| r.final_field.l2_distance(&exact))
            .map_err(|e| e.to_string())
    };
    let (coarse, fine) = (err(4096)?, err(8192)?);
    let ratio = coarse / fine;
    check(
        drift <= 1e-10 && (3.5..=4.5).contains(&ratio) && fine <= 1e-8,
        format!(
            "norm drift {drift:.2e} (tol 1e-10); order ratio {ratio:.4} ([3.5, 4.5]); \
             L2 error at refined dt {fine:.2e} (tol 1e-8)"
        ),
    )
}

fn criterion_8() -> Outcome {
    let unit = UnitSystem::default();
    let ys = WavepacketSpec::yurke_stoler(4.0, 1.0, 1.0).unwrap();
    let pure_p = quadrature(&ys, unit.hbar).mean_p;
    let mixture_p = mixture_moments(&ys, &unit).map_err(|e| e.to_string())?.mean_p;
    let mut config = ExperimentConfig::minimal();
    config.particles[0].spec = ys;
    let report = run_decoherence_comparison(&config).map_err(|e| e.to_string())?;
    let pure_t = report.values["pure_current_mean_t"];
    let mix_t = report.values["mixture_current_mean_t"];
    let tol = SOLVER_REL_TOL * (pure_t + mix_t);
    let gap = (pure_t - mix_t).abs();
    check(
        pure_p.abs() > 1e-3 && mixture_p.abs() <= 1e-12 && gap > 5.0 * tol,
        format!(
            "pure <p> = {pure_p:.6}, mixture <p> = {mixture_p:e}; mean ToF gap {gap:.4} vs 5 x tol = {:.2e}",
            5.0 * tol
        ),
    )
}

fn random_cat(rng: &mut ChaCha8Rng) -> WavepacketSpec {
    let d0 = rng.gen_range(0.5..2.0);
    let delta = d0 * rng.gen_range(0.3..3.0);
    let z0 = rng.gen_range(-5.0..5.0);
    let (rp, rm) = (rng.gen_range(0.2..1.0), rng.gen_range(0.2..1.0));
    let theta = rng.gen_range(-PI..PI);
    WavepacketSpec::cat_with_phase(z0, delta, d0, rp, rm, theta).unwrap()
}

fn random_mass(rng: &mut ChaCha8Rng) -> MassPair {
    MassPair::new(rng.gen_range(0.2..5.0), rng.gen_range(0.2..5.0)).unwrap()
}

fn criterion_9() -> Outcome {
    let unit = UnitSystem::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut feasible, mut infeasible) = (0, 0);
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    while feasible < 50 || infeasible < 10 {
        let (spec1, mass1) = (random_cat(&mut rng), random_mass(&mut rng));
        let (family, mass2) = (random_cat(&mut rng), random_mass(&mut rng));
        let q1 = quadrature(&spec1, unit.hbar);
        let v1 = q1.mean_p / mass1.m_inertial;
        let v_max = max_velocity(&family, &mass2, &unit).unwrap();
        let reachable = v1.abs() < v_max * (1.0 - 1e-9);
        match match_second_particle(&spec1, &mass1, &family, &mass2, &unit) {
            Ok(spec2) if reachable && feasible < 50 => {
                feasible += 1;
                let report = check_matched(&spec1, &mass1, &spec2, &mass2, 1e-9, &unit);
                let q2 = quadrature(&spec2, unit.hbar);
                let dz = (q2.mean_z - q1.mean_z).abs();
                let dv = (q2.mean_p / mass2.m_inertial - v1).abs();
                worst = worst.max(dz).max(dv);
                if !report.matched || dz > 1e-9 || dv > 1e-9 {
                    failures.push(format!("case {feasible}: dz {dz:e}, dv {dv:e}"));
                }
            }
            Ok(_) if v1.abs() <= v_max * (1.0 + 1e-12) => {}
            Ok(_) => failures.push(format!("unreachable v = {v1} (v_max {v_max}) accepted")),
            Err(Error::Infeasible { v_max: reported, .. }) if !reachable => {
                if infeasible < 10 {
                    infeasible += 1;
                    if reported != v_max {
                        failures.push(format!("reported v_max {reported} != {v_max}"));
                    }
                }
            }
            // Within 1e-9 of the branch edge either outcome is acceptable.
            Err(_) if !reachable && v1.abs() <= v_max => {}
            Err(e) => failures.push(format!("reachable v = {v1} (v_max {v_max}) rejected: {e}")),
        }
    }
    check(
        failures.is_empty(),
        format!(
            "{feasible} matched cases, worst residual {worst:.2e} (tol 1e-9); {infeasible} infeasible rejected with v_max{}",
            if failures.is_empty() { String::new() } else { format!("; failures: {failures:?}") }
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("epsilon factors", criterion_1),
        ("Ehrenfest time of flight", criterion_2),
        ("asymptotic spread", criterion_3),
        ("mass-sweep exponents", criterion_4),
        ("gravity vs accelerated frame", criterion_5),
        ("phase structure of <p>", criterion_6),
        ("solver validity", criterion_7),
        ("decoherence split", criterion_8),
        ("preparation matching", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS {name}: {detail} [{secs:.2} s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail} [{secs:.2} s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
