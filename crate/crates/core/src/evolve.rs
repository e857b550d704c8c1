//! Evolution under `H = p^2 / 2 m_i + F z`, with `F = m_g g` in a gravitational
//! field and `F = m_i a` in a uniformly accelerated frame.
//!
//! Two independent engines are provided: closed-form propagation (moments and
//! the exact wavefunction via the extended Galilean transform) and a
//! Strang-split spectral solver.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{GridField, Spectral, GUARD_CELLS, GUARD_PROBABILITY};
use crate::grid::SpatialGrid;
use crate::states::{analytic_moments, build_wavefunction, numeric_moments_with, MomentSet, WavepacketSpec};
use crate::units::{MassPair, UnitSystem};

/// Number of steps per classical fall time used when no step is given.
pub const DEFAULT_STEPS_PER_FALL: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameMode {
    Gravity,
    AcceleratedFrame,
}

impl fmt::Display for FrameMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameMode::Gravity => "gravity",
            FrameMode::AcceleratedFrame => "accelerated_frame",
        })
    }
}

impl FromStr for FrameMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "gravity" => Ok(FrameMode::Gravity),
            "accelerated_frame" | "accelerated" => Ok(FrameMode::AcceleratedFrame),
            other => Err(Error::Config(format!("unknown frame mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearPotentialParams {
    pub mass: MassPair,
    /// `g` in gravity mode, `a` in accelerated-frame mode.
    pub field_strength: f64,
    pub mode: FrameMode,
}

impl LinearPotentialParams {
    pub fn new(mass: MassPair, field_strength: f64, mode: FrameMode) -> Result<Self> {
        if !(field_strength.is_finite() && field_strength >= 0.0) {
            return Err(Error::Config(format!(
                "field strength must be non-negative, got {field_strength}"
            )));
        }
        Ok(LinearPotentialParams {
            mass,
            field_strength,
            mode,
        })
    }

    pub fn gravity(mass: MassPair, g: f64) -> Result<Self> {
        Self::new(mass, g, FrameMode::Gravity)
    }

    pub fn accelerated(mass: MassPair, a: f64) -> Result<Self> {
        Self::new(mass, a, FrameMode::AcceleratedFrame)
    }

    /// Mass multiplying the field in the potential.
    pub fn coupling_mass(&self) -> f64 {
        match self.mode {
            FrameMode::Gravity => self.mass.m_gravitational,
            FrameMode::AcceleratedFrame => self.mass.m_inertial,
        }
    }

    /// Slope of the potential.
    pub fn force(&self) -> f64 {
        self.coupling_mass() * self.field_strength
    }

    /// Downward acceleration of the mean position.
    pub fn g_eff(&self) -> f64 {
        self.force() / self.mass.m_inertial
    }

    pub fn m_inertial(&self) -> f64 {
        self.mass.m_inertial
    }
}

/// Ehrenfest propagation of first and second moments. A uniform force moves
/// the means but leaves the variances and covariance untouched.
pub fn moment_evolution(m0: &MomentSet, params: &LinearPotentialParams, t: f64) -> Result<MomentSet> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Precondition(format!("time must be non-negative, got {t}")));
    }
    let m = params.m_inertial();
    Ok(MomentSet {
        mean_z: m0.mean_z + m0.mean_p / m * t - 0.5 * params.g_eff() * t * t,
        mean_p: m0.mean_p - params.force() * t,
        var_z: m0.var_z + 2.0 * m0.cov_zp * t / m + m0.var_p * t * t / (m * m),
        var_p: m0.var_p,
        cov_zp: m0.cov_zp + m0.var_p * t / m,
    })
}

fn guard(field: &GridField, step: usize) -> Result<()> {
    let p = field.edge_probability(GUARD_CELLS);
    if p > GUARD_PROBABILITY {
        return Err(Error::BoundaryGuard {
            step,
            probability: p,
            cells: GUARD_CELLS,
        });
    }
    Ok(())
}

/// Exact solution at time `t` for an initial field: free spectral evolution,
/// a shift by `g_eff t^2 / 2`, and the frame phase
/// `exp(-i m g_eff t z / hbar - i m g_eff^2 t^3 / 6 hbar)`.
pub fn exact_from_field(
    initial: &GridField,
    params: &LinearPotentialParams,
    t: f64,
    unit: &UnitSystem,
) -> Result<GridField> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Precondition(format!("time must be non-negative, got {t}")));
    }
    if t == 0.0 {
        return Ok(initial.clone());
    }
    let grid = initial.grid();
    let spectral = Spectral::new(grid);
    let hbar = unit.hbar;
    let m = params.m_inertial();
    let a = params.g_eff();
    let shift = 0.5 * a * t * t;

    let mut buf = initial.amplitudes().to_vec();
    spectral.forward(&mut buf);
    let nyq = spectral.nyquist_index();
    for (j, (c, &k)) in buf.iter_mut().zip(spectral.wavenumbers()).enumerate() {
        let phase = -hbar * k * k * t / (2.0 * m) + if j == nyq { 0.0 } else { k * shift };
        *c *= Complex64::from_polar(1.0, phase);
    }
    spectral.inverse(&mut buf);
    let global = -m * a * a * t * t * t / (6.0 * hbar);
    for (j, c) in buf.iter_mut().enumerate() {
        let z = grid.point(j);
        *c *= Complex64::from_polar(1.0, -m * a * t * z / hbar + global);
    }
    let out = GridField::new(grid.clone(), buf)?;
    if out.edge_probability(GUARD_CELLS) > GUARD_PROBABILITY {
        return Err(Error::Domain(format!(
            "wavefunction reaches the grid edge by t = {t}; enlarge the grid"
        )));
    }
    Ok(out)
}

/// [`exact_from_field`] starting from the sampled spec.
pub fn exact_wavefunction(
    spec: &WavepacketSpec,
    params: &LinearPotentialParams,
    t: f64,
    grid: &SpatialGrid,
    unit: &UnitSystem,
) -> Result<GridField> {
    exact_from_field(&build_wavefunction(spec, grid)?, params, t, unit)
}

/// One Strang step `exp(-iV dt/2) exp(-iT dt) exp(-iV dt/2)` on a fixed grid.
/// Negative `dt` gives the inverse step.
pub struct Propagator {
    spectral: Spectral,
    half_potential: Vec<Complex64>,
    kinetic: Vec<Complex64>,
    /// `-F dt / (2 hbar)`: derivative of the half-potential phase.
    half_potential_slope: f64,
    dt: f64,
}

impl Propagator {
    pub fn new(grid: &SpatialGrid, params: &LinearPotentialParams, dt: f64, unit: &UnitSystem) -> Self {
        let spectral = Spectral::new(grid);
        let hbar = unit.hbar;
        let f = params.force();
        let m = params.m_inertial();
        let half_potential = (0..grid.len())
            .map(|j| Complex64::from_polar(1.0, -f * grid.point(j) * dt / (2.0 * hbar)))
            .collect();
        let kinetic = spectral
            .wavenumbers()
            .iter()
            .map(|&k| Complex64::from_polar(1.0, -hbar * k * k * dt / (2.0 * m)))
            .collect();
        Propagator {
            spectral,
            half_potential,
            kinetic,
            half_potential_slope: -f * dt / (2.0 * hbar),
            dt,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn step(&self, psi: &mut [Complex64]) {
        self.step_probed(psi, None);
    }

    /// Advances one step. When `row` is given, returns `Im(psi* dpsi/dz)` at
    /// the probe point after the step, read off the kinetic-stage spectrum.
    pub fn step_probed(&self, psi: &mut [Complex64], row: Option<&[Complex64]>) -> Option<f64> {
        for (a, p) in psi.iter_mut().zip(&self.half_potential) {
            *a *= p;
        }
        self.spectral.forward(psi);
        for (a, k) in psi.iter_mut().zip(&self.kinetic) {
            *a *= k;
        }
        let probe = row.map(|r| {
            let (v, d) = self.spectral.evaluate(psi, r);
            // The closing half kick multiplies by a unit-modulus phase with slope
            // `half_potential_slope`, which adds that slope times |psi|^2.
            (v.conj() * d).im + self.half_potential_slope * v.norm_sqr()
        });
        self.spectral.inverse(psi);
        for (a, p) in psi.iter_mut().zip(&self.half_potential) {
            *a *= p;
        }
        probe
    }
}

/// Probability current sampled at a fixed plane on every solver step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorTrace {
    pub z: f64,
    pub times: Vec<f64>,
    pub current: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitStepOptions {
    /// Record moments (and fields, if stored) every this many steps.
    pub snapshot_stride: usize,
    pub store_fields: bool,
    /// Plane at which to sample the probability current on every step.
    pub detector: Option<f64>,
}

impl Default for SplitStepOptions {
    fn default() -> Self {
        SplitStepOptions {
            snapshot_stride: 16,
            store_fields: false,
            detector: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub params: LinearPotentialParams,
    pub dt: f64,
    pub times: Vec<f64>,
    pub moments: Vec<MomentSet>,
    pub fields: Option<Vec<GridField>>,
    pub detector: Option<DetectorTrace>,
    pub final_field: GridField,
}

impl EvolutionResult {
    pub fn t_final(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }
}

/// Momentum scale the grid must resolve to evolve `initial` until `t_final`:
/// twice the mean momentum reached plus eight momentum widths.
pub fn required_wavenumber(m0: &MomentSet, params: &LinearPotentialParams, t_final: f64, unit: &UnitSystem) -> f64 {
    (2.0 * (m0.mean_p.abs() + params.force() * t_final) + 8.0 * m0.var_p.sqrt()) / unit.hbar
}

/// Default step: the classical fall time from `height` over [`DEFAULT_STEPS_PER_FALL`].
pub fn default_dt(params: &LinearPotentialParams, height: f64) -> Option<f64> {
    let a = params.g_eff();
    (a > 0.0 && height > 0.0).then(|| (2.0 * height / a).sqrt() / DEFAULT_STEPS_PER_FALL as f64)
}

/// Strang-split spectral evolution for `n_steps` steps of size `dt`.
pub fn split_step_evolve(
    field: &GridField,
    params: &LinearPotentialParams,
    dt: f64,
    n_steps: usize,
    options: &SplitStepOptions,
    unit: &UnitSystem,
) -> Result<EvolutionResult> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Config(format!("dt must be positive, got {dt}")));
    }
    if options.snapshot_stride == 0 {
        return Err(Error::Config("snapshot stride must be at least 1".into()));
    }
    let grid = field.grid().clone();
    let propagator = Propagator::new(&grid, params, dt, unit);
    let m0 = numeric_moments_with(field, propagator.spectral(), unit)?;
    let t_final = dt * n_steps as f64;
    let k_need = required_wavenumber(&m0, params, t_final, unit);
    if grid.k_max() < k_need {
        return Err(Error::Config(format!(
            "grid resolves |k| <= {:.4} but the run needs {:.4}; refine the grid",
            grid.k_max(),
            k_need
        )));
    }
    guard(field, 0)?;

    let current_scale = unit.hbar / params.m_inertial();
    let row = options.detector.map(|z| propagator.spectral().evaluation_row(z));
    let mut trace = options.detector.map(|z| {
        let mut spec = field.amplitudes().to_vec();
        propagator.spectral().forward(&mut spec);
        let (v, d) = propagator.spectral().evaluate(&spec, row.as_deref().unwrap_or(&[]));
        DetectorTrace {
            z,
            times: vec![0.0],
            current: vec![current_scale * (v.conj() * d).im],
        }
    });

    let mut psi = field.amplitudes().to_vec();
    let mut times = vec![0.0];
    let mut moments = vec![m0];
    let mut fields = options.store_fields.then(|| vec![field.clone()]);

    for step in 1..=n_steps {
        let probe = propagator.step_probed(&mut psi, row.as_deref());
        let t = dt * step as f64;
        if let (Some(tr), Some(j)) = (trace.as_mut(), probe) {
            tr.times.push(t);
            tr.current.push(current_scale * j);
        }
        let snapshot = step % options.snapshot_stride == 0 || step == n_steps;
        // The guard is cheap; run it every step so wraparound is caught early.
        let current = GridField::new(grid.clone(), psi.clone())?;
        guard(&current, step)?;
        if snapshot {
            times.push(t);
            moments.push(numeric_moments_with(&current, propagator.spectral(), unit)?);
            if let Some(fs) = fields.as_mut() {
                fs.push(current);
            }
        }
    }

    Ok(EvolutionResult {
        params: *params,
        dt,
        times,
        moments,
        fields,
        detector: trace,
        final_field: GridField::new(grid, psi)?,
    })
}

/// Analytic moments of a spec propagated to `t`.
pub fn spec_moments_at(
    spec: &WavepacketSpec,
    params: &LinearPotentialParams,
    t: f64,
    unit: &UnitSystem,
) -> Result<MomentSet> {
    moment_evolution(&analytic_moments(spec, unit), params, t)
}

/// Grid wide enough to hold `spec` from `t = 0` to `t_final` and fine enough
/// for the momentum it acquires, with an extra `include` interval (such as a
/// detector plane) kept inside.
pub fn auto_grid(
    spec: &WavepacketSpec,
    params: &LinearPotentialParams,
    t_final: f64,
    include: Option<f64>,
    unit: &UnitSystem,
) -> Result<SpatialGrid> {
    let m0 = analytic_moments(spec, unit);
    let (lo0, hi0) = spec.peak_centres();
    let mut lo = lo0 - 10.0 * spec.delta0();
    let mut hi = hi0 + 10.0 * spec.delta0();
    let samples = 64;
    for i in 0..=samples {
        let t = t_final * i as f64 / samples as f64;
        let m = moment_evolution(&m0, params, t)?;
        let reach = 12.0 * m.var_z.sqrt();
        lo = lo.min(m.mean_z - reach);
        hi = hi.max(m.mean_z + reach);
    }
    if let Some(z) = include {
        lo = lo.min(z - 1.0);
        hi = hi.max(z + 1.0);
    }
    let k_need = required_wavenumber(&m0, params, t_final, unit);
    let dz_max = std::f64::consts::PI / k_need;
    let span = hi - lo;
    let mut n = 256usize;
    while span / n as f64 > dz_max {
        n *= 2;
        if n > 1 << 20 {
            return Err(Error::Config(format!(
                "auto grid would exceed 2^20 points (span {span}, spacing {dz_max})"
            )));
        }
    }
    SpatialGrid::new(lo, hi, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::numeric_moments;

    fn unit() -> UnitSystem {
        UnitSystem::default()
    }

    fn gravity(m: f64) -> LinearPotentialParams {
        LinearPotentialParams::gravity(MassPair::equal(m).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn mean_reaches_ground() {
        let m0 = MomentSet {
            mean_z: 2.0,
            mean_p: 0.0,
            var_z: 0.5,
            var_p: 0.5,
            cov_zp: 0.0,
        };
        let m = moment_evolution(&m0, &gravity(1.0), 2.0).unwrap();
        assert_eq!(m.mean_z, 0.0);
        assert_eq!(m.mean_p, -2.0);
        assert!(moment_evolution(&m0, &gravity(1.0), -1.0).is_err());
    }

    #[test]
    fn variance_independent_of_field() {
        let m0 = MomentSet {
            mean_z: 1.0,
            mean_p: 0.3,
            var_z: 0.7,
            var_p: 0.4,
            cov_zp: 0.1,
        };
        let a = LinearPotentialParams::gravity(MassPair::new(2.0, 3.0).unwrap(), 1.0).unwrap();
        let b = LinearPotentialParams::gravity(MassPair::new(2.0, 3.0).unwrap(), 2.0).unwrap();
        for t in [0.5, 1.0, 3.0] {
            let ma = moment_evolution(&m0, &a, t).unwrap();
            let mb = moment_evolution(&m0, &b, t).unwrap();
            assert_eq!(ma.var_z, mb.var_z);
            assert_eq!(ma.cov_zp, mb.cov_zp);
            assert_eq!(ma.var_p, mb.var_p);
        }
    }

    #[test]
    fn gaussian_free_spreading() {
        let s = WavepacketSpec::gaussian(0.0, 1.0).unwrap();
        for t in [0.0, 1.0, 2.5] {
            let m = spec_moments_at(&s, &gravity(1.0), t, &unit()).unwrap();
            assert!((m.var_z - (0.5 + 0.5 * t * t)).abs() < 1e-14);
        }
    }

    #[test]
    fn coupling_mass_per_mode() {
        let mp = MassPair::new(2.0, 6.0).unwrap();
        let g = LinearPotentialParams::gravity(mp, 1.5).unwrap();
        let a = LinearPotentialParams::accelerated(mp, 1.5).unwrap();
        assert_eq!(g.g_eff(), 4.5);
        assert_eq!(a.g_eff(), 1.5);
        assert!(LinearPotentialParams::gravity(mp, -1.0).is_err());
    }

    #[test]
    fn exact_at_zero_time_is_identity() {
        let s = WavepacketSpec::yurke_stoler(0.0, 1.0, 1.0).unwrap();
        let grid = SpatialGrid::new(-20.0, 20.0, 512).unwrap();
        let f0 = build_wavefunction(&s, &grid).unwrap();
        let f = exact_wavefunction(&s, &gravity(1.0), 0.0, &grid, &unit()).unwrap();
        assert_eq!(f, f0);
    }

    #[test]
    fn exact_free_evolution_spreads() {
        let s = WavepacketSpec::gaussian(0.0, 1.0).unwrap();
        let free = LinearPotentialParams::gravity(MassPair::equal(1.0).unwrap(), 0.0).unwrap();
        let grid = SpatialGrid::new(-40.0, 40.0, 1024).unwrap();
        let f = exact_wavefunction(&s, &free, 3.0, &grid, &unit()).unwrap();
        let m = numeric_moments(&f, &unit()).unwrap();
        assert!((m.var_z - 5.0).abs() < 1e-10);
        assert!(m.mean_z.abs() < 1e-12);
    }

    #[test]
    fn exact_matches_moment_evolution() {
        let s = WavepacketSpec::cat_with_phase(2.0, 1.0, 0.8, 1.0, 0.6, 0.9).unwrap();
        let params = LinearPotentialParams::gravity(MassPair::new(1.3, 0.9).unwrap(), 1.0).unwrap();
        let grid = SpatialGrid::new(-30.0, 20.0, 2048).unwrap();
        let t = 2.5;
        let f = exact_wavefunction(&s, &params, t, &grid, &unit()).unwrap();
        let num = numeric_moments(&f, &unit()).unwrap();
        let ana = spec_moments_at(&s, &params, t, &unit()).unwrap();
        assert!((num.mean_z - ana.mean_z).abs() < 1e-8);
        assert!((num.mean_p - ana.mean_p).abs() < 1e-8);
        assert!((num.var_z - ana.var_z).abs() < 1e-8);
        assert!((num.var_p - ana.var_p).abs() < 1e-8);
        assert!((num.cov_zp - ana.cov_zp).abs() < 1e-8);
    }

    #[test]
    fn exact_rejects_escaping_support() {
        let s = WavepacketSpec::gaussian(0.0, 1.0).unwrap();
        let grid = SpatialGrid::new(-10.0, 10.0, 256).unwrap();
        assert!(matches!(
            exact_wavefunction(&s, &gravity(1.0), 6.0, &grid, &unit()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn step_and_inverse_restore_field() {
        let s = WavepacketSpec::yurke_stoler(1.0, 1.0, 1.0).unwrap();
        let grid = SpatialGrid::new(-20.0, 20.0, 1024).unwrap();
        let f = build_wavefunction(&s, &grid).unwrap();
        let fwd = Propagator::new(&grid, &gravity(1.0), 0.01, &unit());
        let back = Propagator::new(&grid, &gravity(1.0), -0.01, &unit());
        let mut psi = f.amplitudes().to_vec();
        fwd.step(&mut psi);
        back.step(&mut psi);
        let g = GridField::new(grid, psi).unwrap();
        assert!(g.l2_distance(&f).unwrap() < 1e-12);
    }

    #[test]
    fn split_step_free_gaussian() {
        let s = WavepacketSpec::gaussian(0.0, 1.0).unwrap();
        let free = LinearPotentialParams::gravity(MassPair::equal(1.0).unwrap(), 0.0).unwrap();
        let grid = SpatialGrid::new(-40.0, 40.0, 1024).unwrap();
        let f = build_wavefunction(&s, &grid).unwrap();
        let r = split_step_evolve(&f, &free, 0.01, 200, &SplitStepOptions::default(), &unit()).unwrap();
        let t = r.t_final();
        let m = r.moments.last().unwrap();
        assert!((m.var_z - (0.5 + 0.5 * t * t)).abs() < 1e-8);
        assert!((r.final_field.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn split_step_rejects_bad_settings() {
        let s = WavepacketSpec::gaussian(0.0, 1.0).unwrap();
        let grid = SpatialGrid::new(-40.0, 40.0, 128).unwrap();
        let f = build_wavefunction(&s, &grid).unwrap();
        let opts = SplitStepOptions::default();
        assert!(matches!(split_step_evolve(&f, &gravity(1.0), 0.0, 10, &opts, &unit()), Err(Error::Config(_))));
        // 128 points over 80 units resolve |k| < 5; falling for 10 time units needs ~26.
        assert!(matches!(split_step_evolve(&f, &gravity(1.0), 0.01, 1000, &opts, &unit()), Err(Error::Config(_))));
    }

    #[test]
    fn boundary_guard_reports_step() {
        let s = WavepacketSpec::gaussian(0.0, 1.0).unwrap();
        let grid = SpatialGrid::new(-12.0, 12.0, 512).unwrap();
        let f = build_wavefunction(&s, &grid).unwrap();
        match split_step_evolve(&f, &gravity(1.0), 0.01, 600, &SplitStepOptions::default(), &unit()) {
            Err(Error::BoundaryGuard { step, .. }) => assert!(step > 0 && step < 600),
            other => panic!("expected guard trip, got {other:?}"),
        }
    }

    #[test]
    fn detector_current_matches_field_current() {
        let s = WavepacketSpec::yurke_stoler(2.0, 1.0, 1.0).unwrap();
        let p = gravity(1.0);
        let grid = SpatialGrid::new(-20.0, 12.0, 1024).unwrap();
        let f = build_wavefunction(&s, &grid).unwrap();
        let opts = SplitStepOptions {
            snapshot_stride: 50,
            store_fields: true,
            detector: Some(0.1),
        };
        let r = split_step_evolve(&f, &p, 0.004, 500, &opts, &unit()).unwrap();
        let trace = r.detector.as_ref().unwrap();
        let fields = r.fields.as_ref().unwrap();
        for (t, field) in r.times.iter().zip(fields) {
            let i = (t / r.dt).round() as usize;
            let spectral = Spectral::new(field.grid());
            let mut spec = field.amplitudes().to_vec();
            spectral.forward(&mut spec);
            let (v, d) = spectral.evaluate(&spec, &spectral.evaluation_row(0.1));
            let j = (v.conj() * d).im;
            assert!((trace.current[i] - j).abs() < 1e-9 * j.abs().max(1e-3), "t={t} {} {j}", trace.current[i]);
        }
    }

    #[test]
    fn auto_grid_holds_the_fall() {
        let s = WavepacketSpec::gaussian(2.0, 1.0).unwrap();
        let p = gravity(1.0);
        let g = auto_grid(&s, &p, 4.0, Some(0.0), &unit()).unwrap();
        let f = build_wavefunction(&s, &g).unwrap();
        let dt = default_dt(&p, 2.0).unwrap();
        let n = (4.0 / dt).round() as usize;
        split_step_evolve(&f, &p, dt, n, &SplitStepOptions { snapshot_stride: 512, ..Default::default() }, &unit()).unwrap();
    }
}
