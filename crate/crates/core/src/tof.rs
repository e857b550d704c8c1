//! Time-of-flight estimators.
//!
//! Three routes to the arrival statistics at a detector plane:
//! the Ehrenfest crossing of the mean position, the semiclassical spread
//! `sigma_z(T) / |v_z(T)|` together with its spreading-dominated limit, and
//! an arrival density built from the probability current through the plane.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::{moment_evolution, EvolutionResult, LinearPotentialParams};
use crate::field::Spectral;
use crate::states::{analytic_moments, MomentSet, WavepacketSpec};
use crate::units::UnitSystem;

/// Half-width of the arrival window in predicted standard deviations.
pub const WINDOW_SIGMAS: f64 = 8.0;
/// Half-width used when the first window misses flux.
pub const EXTENDED_WINDOW_SIGMAS: f64 = 12.0;
/// Fraction of the simulated downward flux the window must capture.
pub const FLUX_CAPTURE: f64 = 0.999;

/// Smallest positive `t` with `z + v t - a t^2 / 2 = z_detector`.
pub fn crossing_time(mean_z: f64, velocity: f64, accel: f64, z_detector: f64) -> Result<f64> {
    let h = mean_z - z_detector;
    let roots: Vec<f64> = if accel == 0.0 {
        if velocity == 0.0 {
            vec![]
        } else {
            vec![-h / velocity]
        }
    } else {
        // a t^2 / 2 - v t - h = 0
        let disc = velocity * velocity + 2.0 * accel * h;
        if disc < 0.0 {
            vec![]
        } else {
            let q = velocity + velocity.signum() * disc.sqrt();
            let q = if velocity == 0.0 { disc.sqrt() } else { q };
            if q == 0.0 {
                vec![0.0]
            } else {
                vec![q / accel, -2.0 * h / q]
            }
        }
    };
    roots
        .into_iter()
        .filter(|t| *t > 0.0 && t.is_finite())
        .min_by(|a, b| a.total_cmp(b))
        .ok_or_else(|| {
            Error::NoCrossing(format!(
                "mean position {mean_z} with velocity {velocity} and acceleration {accel} never reaches {z_detector}"
            ))
        })
}

/// Ehrenfest crossing time from initial moments.
pub fn crossing_from_moments(m0: &MomentSet, params: &LinearPotentialParams, z_detector: f64) -> Result<f64> {
    crossing_time(m0.mean_z, m0.mean_p / params.m_inertial(), params.g_eff(), z_detector)
}

/// Mean time of flight of `spec` to `z_detector`.
pub fn ehrenfest_tof(
    spec: &WavepacketSpec,
    params: &LinearPotentialParams,
    z_detector: f64,
    unit: &UnitSystem,
) -> Result<f64> {
    crossing_from_moments(&analytic_moments(spec, unit), params, z_detector)
}

/// Ratio of the state's momentum spread to that of a Gaussian of the same width.
pub fn epsilon_factor(spec: &WavepacketSpec, unit: &UnitSystem) -> f64 {
    let reference = unit.hbar * unit.hbar / (2.0 * spec.delta0() * spec.delta0());
    (analytic_moments(spec, unit).var_p / reference).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaTof {
    /// `sqrt(var_z(T)) / |v(T)|` from propagated moments.
    pub full: f64,
    /// `(sqrt 2 / 2) eps hbar / (Delta0 F)`, the spreading-dominated limit.
    pub asymptotic: f64,
}

/// `sqrt(var_z(T)) / |v(T)|` for arbitrary initial moments.
pub fn sigma_full_from_moments(m0: &MomentSet, params: &LinearPotentialParams, z_detector: f64) -> Result<f64> {
    let t = crossing_from_moments(m0, params, z_detector)?;
    let m = moment_evolution(m0, params, t)?;
    let v = m.mean_p / params.m_inertial();
    if v == 0.0 {
        return Err(Error::Degenerate("mean velocity vanishes at the crossing".into()));
    }
    Ok(m.var_z.sqrt() / v.abs())
}

pub fn semiclassical_sigma_tof(
    spec: &WavepacketSpec,
    params: &LinearPotentialParams,
    z_detector: f64,
    unit: &UnitSystem,
) -> Result<SigmaTof> {
    let full = sigma_full_from_moments(&analytic_moments(spec, unit), params, z_detector)?;
    let force = params.force();
    if force <= 0.0 {
        return Err(Error::Precondition(
            "the asymptotic spread needs a nonzero field".into(),
        ));
    }
    let asymptotic = std::f64::consts::FRAC_1_SQRT_2 * epsilon_factor(spec, unit) * unit.hbar
        / (spec.delta0() * force);
    Ok(SigmaTof { full, asymptotic })
}

/// Normalized arrival-time density on a window of the simulated time axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TofDistribution {
    pub times: Vec<f64>,
    pub density: Vec<f64>,
    pub mean_t: f64,
    pub std_t: f64,
    pub window: (f64, f64),
    /// Integrated upward (backflow) current removed from the density.
    pub clipped_negativity: f64,
    /// Share of all simulated downward flux falling inside the window.
    pub captured_fraction: f64,
    /// Set when `captured_fraction` stays below [`FLUX_CAPTURE`].
    pub flux_warning: bool,
}

impl TofDistribution {
    /// Builds a distribution from a sampled downward flux `-J(t)`.
    pub fn from_flux(times: &[f64], flux: &[f64], window: (f64, f64)) -> Result<Self> {
        if times.len() != flux.len() || times.len() < 2 {
            return Err(Error::Config("flux needs at least two samples".into()));
        }
        let idx: Vec<usize> = (0..times.len())
            .filter(|&i| times[i] >= window.0 && times[i] <= window.1)
            .collect();
        if idx.len() < 3 {
            return Err(Error::Config(format!(
                "window [{}, {}] holds fewer than three samples",
                window.0, window.1
            )));
        }
        let t: Vec<f64> = idx.iter().map(|&i| times[i]).collect();
        let f: Vec<f64> = idx.iter().map(|&i| flux[i]).collect();
        let positive: Vec<f64> = f.iter().map(|v| v.max(0.0)).collect();
        let negative: Vec<f64> = f.iter().map(|v| (-v).max(0.0)).collect();
        let all_positive: Vec<f64> = flux.iter().map(|v| v.max(0.0)).collect();

        let inside = trapezoid(&t, &positive);
        let total = trapezoid(times, &all_positive);
        if inside.is_nan() || inside <= 0.0 {
            return Err(Error::Degenerate("no downward flux inside the window".into()));
        }
        let density: Vec<f64> = positive.iter().map(|v| v / inside).collect();
        let (mean_t, std_t) = moments_of(&t, &density);
        Ok(TofDistribution {
            window: (t[0], t[t.len() - 1]),
            clipped_negativity: trapezoid(&t, &negative),
            captured_fraction: inside / total,
            flux_warning: inside / total < FLUX_CAPTURE,
            times: t,
            density,
            mean_t,
            std_t,
        })
    }

    /// Trapezoid cumulative distribution on `times`.
    pub fn cumulative(&self) -> Vec<f64> {
        cumulative_trapezoid(&self.times, &self.density)
    }

    /// Mean and standard deviation recomputed from the stored density.
    pub fn recompute_moments(&self) -> (f64, f64) {
        moments_of(&self.times, &self.density)
    }

    pub fn integral(&self) -> f64 {
        trapezoid(&self.times, &self.density)
    }
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

fn cumulative_trapezoid(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    out.push(0.0);
    for (xs, ys) in x.windows(2).zip(y.windows(2)) {
        acc += 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]);
        out.push(acc);
    }
    out
}

fn moments_of(t: &[f64], rho: &[f64]) -> (f64, f64) {
    let weighted: Vec<f64> = t.iter().zip(rho).map(|(t, r)| t * r).collect();
    let mean = trapezoid(t, &weighted);
    let centred: Vec<f64> = t.iter().zip(rho).map(|(t, r)| (t - mean) * (t - mean) * r).collect();
    (mean, trapezoid(t, &centred).sqrt())
}

/// Downward flux `-J(z_detector, t)` from an evolution: the per-step detector
/// trace when it was recorded at this plane, otherwise the stored snapshots.
pub fn detector_flux(result: &EvolutionResult, z_detector: f64, unit: &UnitSystem) -> Result<(Vec<f64>, Vec<f64>)> {
    if let Some(trace) = result.detector.as_ref().filter(|d| d.z == z_detector) {
        return Ok((trace.times.clone(), trace.current.iter().map(|j| -j).collect()));
    }
    let fields = result.fields.as_ref().ok_or_else(|| {
        Error::Config(format!(
            "evolution holds neither a detector trace at z = {z_detector} nor field snapshots"
        ))
    })?;
    let grid = fields
        .first()
        .ok_or_else(|| Error::Config("no field snapshots".into()))?
        .grid();
    let spectral = Spectral::new(grid);
    let row = spectral.evaluation_row(z_detector);
    let scale = unit.hbar / result.params.m_inertial();
    let flux = fields
        .iter()
        .map(|f| {
            let mut spec = f.amplitudes().to_vec();
            spectral.forward(&mut spec);
            let (v, d) = spectral.evaluate(&spec, &row);
            -scale * (v.conj() * d).im
        })
        .collect();
    Ok((result.times.clone(), flux))
}

/// Predicted `(T, sigma)` used to centre the arrival window.
pub fn predicted_arrival(result: &EvolutionResult, z_detector: f64) -> Result<(f64, f64)> {
    let m0 = result
        .moments
        .first()
        .ok_or_else(|| Error::Config("evolution has no moments".into()))?;
    let t = crossing_from_moments(m0, &result.params, z_detector)?;
    let sigma = sigma_full_from_moments(m0, &result.params, z_detector)?;
    Ok((t, sigma))
}

/// Arrival-time density from the probability current through `z_detector`,
/// on the window `T +- 8 sigma` (widened once to 12 sigma if it misses flux).
pub fn current_tof_distribution(
    result: &EvolutionResult,
    z_detector: f64,
    unit: &UnitSystem,
) -> Result<TofDistribution> {
    let (t_mean, sigma) = predicted_arrival(result, z_detector)?;
    let t_end = result.t_final();
    let upper = t_mean + WINDOW_SIGMAS * sigma;
    // Allow for the last step landing a rounding error short.
    if upper > t_end * (1.0 + 1e-12) {
        return Err(Error::Config(format!(
            "arrival window ends at {upper} but the run stops at {t_end}"
        )));
    }
    let (times, flux) = detector_flux(result, z_detector, unit)?;
    let window = ((t_mean - WINDOW_SIGMAS * sigma).max(0.0), upper.min(t_end));
    let first = TofDistribution::from_flux(&times, &flux, window)?;
    if !first.flux_warning {
        return Ok(first);
    }
    let wide = (
        (t_mean - EXTENDED_WINDOW_SIGMAS * sigma).max(0.0),
        (t_mean + EXTENDED_WINDOW_SIGMAS * sigma).min(t_end),
    );
    TofDistribution::from_flux(&times, &flux, wide)
}

/// Arrival density on an explicit window.
pub fn current_tof_distribution_in(
    result: &EvolutionResult,
    z_detector: f64,
    window: (f64, f64),
    unit: &UnitSystem,
) -> Result<TofDistribution> {
    let (times, flux) = detector_flux(result, z_detector, unit)?;
    TofDistribution::from_flux(&times, &flux, window)
}

/// Time at which the solver's mean position first passes `z_detector`,
/// interpolated quadratically through neighbouring snapshots.
pub fn moment_crossing_time(result: &EvolutionResult, z_detector: f64) -> Result<f64> {
    let z: Vec<f64> = result.moments.iter().map(|m| m.mean_z - z_detector).collect();
    let t = &result.times;
    let i = (0..z.len().saturating_sub(1))
        .find(|&i| z[i] >= 0.0 && z[i + 1] < 0.0)
        .ok_or_else(|| Error::NoCrossing("mean position never passes the detector".into()))?;
    if z.len() < 3 {
        return Ok(t[i] + z[i] / (z[i] - z[i + 1]) * (t[i + 1] - t[i]));
    }
    let j = if i + 2 < z.len() { i } else { i - 1 };
    let (t0, t1, t2) = (t[j], t[j + 1], t[j + 2]);
    let (z0, z1, z2) = (z[j], z[j + 1], z[j + 2]);
    let p = |x: f64| {
        z0 * (x - t1) * (x - t2) / ((t0 - t1) * (t0 - t2))
            + z1 * (x - t0) * (x - t2) / ((t1 - t0) * (t1 - t2))
            + z2 * (x - t0) * (x - t1) / ((t2 - t0) * (t2 - t1))
    };
    let (mut lo, mut hi) = (t[i], t[i + 1]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionDistance {
    pub l1: f64,
    pub ks: f64,
}

/// L1 distance of densities and Kolmogorov-Smirnov distance of cumulatives,
/// after linear resampling onto a common grid spanning both windows.
pub fn distribution_distance(d1: &TofDistribution, d2: &TofDistribution) -> Result<DistributionDistance> {
    if d1.window.1 < d2.window.0 || d2.window.1 < d1.window.0 {
        return Err(Error::Precondition("distribution windows do not overlap".into()));
    }
    if d1.times == d2.times {
        let diff: Vec<f64> = d1.density.iter().zip(&d2.density).map(|(a, b)| (a - b).abs()).collect();
        let (c1, c2) = (d1.cumulative(), d2.cumulative());
        let ks = c1.iter().zip(&c2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        return Ok(DistributionDistance {
            l1: trapezoid(&d1.times, &diff),
            ks,
        });
    }
    let lo = d1.window.0.min(d2.window.0);
    let hi = d1.window.1.max(d2.window.1);
    let step = min_step(&d1.times).min(min_step(&d2.times));
    let n = (((hi - lo) / step).ceil() as usize).max(2) + 1;
    let grid: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let r1: Vec<f64> = grid.iter().map(|&t| interp(&d1.times, &d1.density, t)).collect();
    let r2: Vec<f64> = grid.iter().map(|&t| interp(&d2.times, &d2.density, t)).collect();
    let diff: Vec<f64> = r1.iter().zip(&r2).map(|(a, b)| (a - b).abs()).collect();
    let c1 = cumulative_trapezoid(&grid, &r1);
    let c2 = cumulative_trapezoid(&grid, &r2);
    let ks = c1.iter().zip(&c2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(DistributionDistance {
        l1: trapezoid(&grid, &diff),
        ks,
    })
}

fn min_step(t: &[f64]) -> f64 {
    t.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

/// Linear interpolation, zero outside the sampled range.
fn interp(x: &[f64], y: &[f64], t: f64) -> f64 {
    if t < x[0] || t > x[x.len() - 1] {
        return 0.0;
    }
    let i = x.partition_point(|&v| v <= t).clamp(1, x.len() - 1);
    let (x0, x1) = (x[i - 1], x[i]);
    let w = if x1 > x0 { (t - x0) / (x1 - x0) } else { 0.0 };
    y[i - 1] * (1.0 - w) + y[i] * w
}
