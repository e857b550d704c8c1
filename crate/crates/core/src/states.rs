//! Gaussian and two-peak cat wavepackets.
//!
//! A cat is `N { c+ g(z - z0 + D) + c- g(z - z0 - D) }` with
//! `g(u) = exp(-u^2 / 2 D0^2)`. All closed forms below come from the three
//! Gaussian integrals of the peak pair: self overlap `sqrt(pi) D0`, cross
//! overlap `sqrt(pi) D0 exp(-D^2/D0^2)`, and their first and second moments.
//! The relative phase `theta = arg c- - arg c+` is never stored separately.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{GridField, Spectral};
use crate::grid::SpatialGrid;
use crate::units::UnitSystem;

/// Peaks must sit this many widths inside the grid.
pub const PEAK_MARGIN_WIDTHS: f64 = 8.0;
/// Separations below this fraction of the width count as zero.
pub const DELTA_ZERO_TOL: f64 = 1e-12;
/// Relative normalization denominator below which a state is rejected as empty.
pub const DEGENERATE_TOL: f64 = 1e-10;
/// Allowed deviation from unit norm for numeric moments.
pub const NORM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Gaussian,
    Cat,
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StateKind::Gaussian => "gaussian",
            StateKind::Cat => "cat",
        })
    }
}

impl FromStr for StateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" => Ok(StateKind::Gaussian),
            "cat" => Ok(StateKind::Cat),
            other => Err(Error::InvalidSpec(format!("unknown state kind '{other}'"))),
        }
    }
}

/// Parametric initial state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "SpecRecord", try_from = "SpecRecord")]
pub struct WavepacketSpec {
    kind: StateKind,
    z0: f64,
    delta: f64,
    delta0: f64,
    c_plus: Complex64,
    c_minus: Complex64,
}

impl WavepacketSpec {
    pub fn new(
        kind: StateKind,
        z0: f64,
        delta: f64,
        delta0: f64,
        c_plus: Complex64,
        c_minus: Complex64,
    ) -> Result<Self> {
        let spec = WavepacketSpec {
            kind,
            z0,
            delta,
            delta0,
            c_plus,
            c_minus,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn gaussian(z0: f64, delta0: f64) -> Result<Self> {
        Self::new(
            StateKind::Gaussian,
            z0,
            0.0,
            delta0,
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        )
    }

    pub fn cat(z0: f64, delta: f64, delta0: f64, c_plus: Complex64, c_minus: Complex64) -> Result<Self> {
        Self::new(StateKind::Cat, z0, delta, delta0, c_plus, c_minus)
    }

    /// Cat with moduli `|c+|, |c-|` and relative phase `theta` carried by `c-`.
    pub fn cat_with_phase(
        z0: f64,
        delta: f64,
        delta0: f64,
        mod_plus: f64,
        mod_minus: f64,
        theta: f64,
    ) -> Result<Self> {
        Self::cat(
            z0,
            delta,
            delta0,
            Complex64::new(mod_plus, 0.0),
            Complex64::from_polar(mod_minus, theta),
        )
    }

    /// Even cat, `c+ = c- = 1`.
    pub fn male(z0: f64, delta: f64, delta0: f64) -> Result<Self> {
        Self::cat(z0, delta, delta0, Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))
    }

    /// Odd cat, `c+ = -c- = 1`.
    pub fn female(z0: f64, delta: f64, delta0: f64) -> Result<Self> {
        Self::cat(z0, delta, delta0, Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0))
    }

    /// Equal-weight cat with `theta = pi/2`.
    pub fn yurke_stoler(z0: f64, delta: f64, delta0: f64) -> Result<Self> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::cat(z0, delta, delta0, Complex64::new(h, 0.0), Complex64::new(0.0, h))
    }

    fn validate(&self) -> Result<()> {
        let finite = [self.z0, self.delta, self.delta0, self.c_plus.re, self.c_plus.im, self.c_minus.re, self.c_minus.im]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidSpec("non-finite parameter".into()));
        }
        if self.delta0 <= 0.0 {
            return Err(Error::InvalidSpec(format!("Delta0 must be positive, got {}", self.delta0)));
        }
        if self.delta < 0.0 {
            return Err(Error::InvalidSpec(format!("Delta must be non-negative, got {}", self.delta)));
        }
        let zero_sep = self.delta <= DELTA_ZERO_TOL * self.delta0;
        match self.kind {
            StateKind::Gaussian if !zero_sep => {
                return Err(Error::InvalidSpec(format!(
                    "Gaussian kind requires Delta = 0, got {}",
                    self.delta
                )))
            }
            StateKind::Cat if zero_sep => {
                return Err(Error::InvalidSpec("cat kind requires Delta > 0".into()))
            }
            _ => {}
        }
        let (cp, cm) = self.coefficients();
        if cp.norm_sqr() + cm.norm_sqr() == 0.0 {
            return Err(Error::InvalidSpec("both coefficients are zero".into()));
        }
        let w = cp.norm_sqr() + cm.norm_sqr();
        if self.overlap_sum() <= DEGENERATE_TOL * w {
            return Err(Error::Degenerate(
                "destructive superposition has vanishing norm".into(),
            ));
        }
        Ok(())
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn delta0(&self) -> f64 {
        self.delta0
    }

    pub fn c_plus(&self) -> Complex64 {
        self.c_plus
    }

    pub fn c_minus(&self) -> Complex64 {
        self.c_minus
    }

    /// Coefficients actually used; the Gaussian kind ignores `c-`.
    pub fn coefficients(&self) -> (Complex64, Complex64) {
        match self.kind {
            StateKind::Gaussian => (self.c_plus, Complex64::new(0.0, 0.0)),
            StateKind::Cat => (self.c_plus, self.c_minus),
        }
    }

    /// Relative phase `arg c- - arg c+`, wrapped to `(-pi, pi]`.
    pub fn theta(&self) -> f64 {
        let (cp, cm) = self.coefficients();
        (cp.conj() * cm).arg()
    }

    /// Copy translated so that its `z0` is `z0`.
    pub fn with_z0(&self, z0: f64) -> Result<Self> {
        Self::new(self.kind, z0, self.delta, self.delta0, self.c_plus, self.c_minus)
    }

    /// Copy with the relative phase set to `theta`, moduli unchanged.
    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        match self.kind {
            StateKind::Gaussian => Ok(*self),
            StateKind::Cat => {
                let cm = Complex64::from_polar(self.c_minus.norm(), self.c_plus.arg() + theta);
                Self::new(self.kind, self.z0, self.delta, self.delta0, self.c_plus, cm)
            }
        }
    }

    /// Branch centres `(z0 - D, z0 + D)` carried by `c+` and `c-`.
    pub fn peak_centres(&self) -> (f64, f64) {
        (self.z0 - self.delta, self.z0 + self.delta)
    }

    /// `exp(-D^2/D0^2)`, the overlap of the two unit peaks relative to a self overlap.
    fn overlap_factor(&self) -> f64 {
        let x = self.delta / self.delta0;
        (-x * x).exp()
    }

    /// `|c+|^2 + |c-|^2 + 2 Re(c+* c-) exp(-D^2/D0^2)`, evaluated without cancellation.
    fn overlap_sum(&self) -> f64 {
        let (cp, cm) = self.coefficients();
        let x = self.delta / self.delta0;
        let s = (cp.conj() * cm).re;
        (cp + cm).norm_sqr() + 2.0 * s * (-x * x).exp_m1()
    }

    /// `|N|^2 sqrt(pi) D0`: the weight that turns peak integrals into expectation values.
    fn weight(&self) -> f64 {
        1.0 / self.overlap_sum()
    }

    /// Amplitude of the normalized continuum wavefunction at `z`.
    pub fn amplitude(&self, z: f64) -> Complex64 {
        let (cp, cm) = self.coefficients();
        let n = normalization_constant(self);
        let two_w2 = 2.0 * self.delta0 * self.delta0;
        let up = z - self.z0 + self.delta;
        let um = z - self.z0 - self.delta;
        (cp * (-up * up / two_w2).exp() + cm * (-um * um / two_w2).exp()) * n
    }
}

impl fmt::Display for WavepacketSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}(z0={}, delta={}, delta0={}, c+={}, c-={})",
            self.kind, self.z0, self.delta, self.delta0, self.c_plus, self.c_minus
        )
    }
}

/// Flat key-value form used in configs and manifests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecRecord {
    pub kind: StateKind,
    pub z0: f64,
    pub delta: f64,
    pub delta0: f64,
    pub c_plus_re: f64,
    pub c_plus_im: f64,
    pub c_minus_re: f64,
    pub c_minus_im: f64,
}

impl From<WavepacketSpec> for SpecRecord {
    fn from(s: WavepacketSpec) -> Self {
        SpecRecord {
            kind: s.kind,
            z0: s.z0,
            delta: s.delta,
            delta0: s.delta0,
            c_plus_re: s.c_plus.re,
            c_plus_im: s.c_plus.im,
            c_minus_re: s.c_minus.re,
            c_minus_im: s.c_minus.im,
        }
    }
}

impl TryFrom<SpecRecord> for WavepacketSpec {
    type Error = Error;

    fn try_from(r: SpecRecord) -> Result<Self> {
        WavepacketSpec::new(
            r.kind,
            r.z0,
            r.delta,
            r.delta0,
            Complex64::new(r.c_plus_re, r.c_plus_im),
            Complex64::new(r.c_minus_re, r.c_minus_im),
        )
    }
}

/// Named families used by sweeps and the equivalence test matrix. Cats use
/// `Delta = Delta0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatePreset {
    Gaussian,
    Male,
    Female,
    YurkeStoler,
}

impl StatePreset {
    pub const ALL: [StatePreset; 4] = [
        StatePreset::Gaussian,
        StatePreset::Male,
        StatePreset::Female,
        StatePreset::YurkeStoler,
    ];

    pub fn spec(&self, z0: f64, delta0: f64) -> Result<WavepacketSpec> {
        match self {
            StatePreset::Gaussian => WavepacketSpec::gaussian(z0, delta0),
            StatePreset::Male => WavepacketSpec::male(z0, delta0, delta0),
            StatePreset::Female => WavepacketSpec::female(z0, delta0, delta0),
            StatePreset::YurkeStoler => WavepacketSpec::yurke_stoler(z0, delta0, delta0),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            StatePreset::Gaussian => "gaussian",
            StatePreset::Male => "male",
            StatePreset::Female => "female",
            StatePreset::YurkeStoler => "yurke-stoler",
        }
    }
}

impl FromStr for StatePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "gaussian" => Ok(StatePreset::Gaussian),
            "male" | "even" => Ok(StatePreset::Male),
            "female" | "odd" => Ok(StatePreset::Female),
            "yurke-stoler" | "ys" => Ok(StatePreset::YurkeStoler),
            other => Err(Error::InvalidSpec(format!("unknown state preset '{other}'"))),
        }
    }
}

/// First and second moments of position and momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub mean_z: f64,
    pub mean_p: f64,
    pub var_z: f64,
    pub var_p: f64,
    /// Symmetrized covariance `<{z - <z>, p - <p>}>/2`.
    pub cov_zp: f64,
}

impl MomentSet {
    /// `var_z var_p - cov_zp^2`, bounded below by `hbar^2/4`.
    pub fn uncertainty_product(&self) -> f64 {
        self.var_z * self.var_p - self.cov_zp * self.cov_zp
    }
}

/// Positive real normalization `N` of a spec.
pub fn normalization_constant(spec: &WavepacketSpec) -> f64 {
    (1.0 / (PI.sqrt() * spec.delta0 * spec.overlap_sum())).sqrt()
}

/// Samples the normalized wavefunction on `grid`, then renormalizes on the grid.
pub fn build_wavefunction(spec: &WavepacketSpec, grid: &SpatialGrid) -> Result<GridField> {
    let (lo, hi) = spec.peak_centres();
    let margin = PEAK_MARGIN_WIDTHS * spec.delta0;
    if !grid.contains_with_margin(lo, hi, margin) {
        return Err(Error::Domain(format!(
            "peaks at [{lo}, {hi}] need {margin} clearance inside [{}, {})",
            grid.z_min(),
            grid.z_max()
        )));
    }
    GridField::from_fn(grid.clone(), |z| spec.amplitude(z)).normalized()
}

/// Closed-form moments from Gaussian overlap integrals.
pub fn analytic_moments(spec: &WavepacketSpec, unit: &UnitSystem) -> MomentSet {
    let (cp, cm) = spec.coefficients();
    let hbar = unit.hbar;
    let d = spec.delta;
    let w0 = spec.delta0;
    let a = spec.overlap_factor();
    let cross = cp.conj() * cm;
    let weight = spec.weight();
    let wp = cp.norm_sqr();
    let wm = cm.norm_sqr();

    // Offsets from z0.
    let mean_u = weight * d * (wm - wp);
    let mean_u2 = 0.5 * w0 * w0 + weight * (wp + wm) * d * d;
    let mean_p = 2.0 * hbar * weight * d / (w0 * w0) * a * cross.im;
    let mean_p2 =
        hbar * hbar / (2.0 * w0 * w0) - 2.0 * hbar * hbar * cross.re * a * weight * d * d / w0.powi(4);

    MomentSet {
        mean_z: spec.z0 + mean_u,
        mean_p,
        var_z: mean_u2 - mean_u * mean_u,
        var_p: mean_p2 - mean_p * mean_p,
        // <{u, p}>/2 vanishes for real peak profiles.
        cov_zp: -mean_u * mean_p,
    }
}

/// Moments of a sampled field by rectangle-rule quadrature; momentum moments
/// use the spectral representation.
pub fn numeric_moments(field: &GridField, unit: &UnitSystem) -> Result<MomentSet> {
    numeric_moments_with(field, &Spectral::new(field.grid()), unit)
}

/// [`numeric_moments`] reusing an existing transform plan for the field's grid.
pub fn numeric_moments_with(field: &GridField, spectral: &Spectral, unit: &UnitSystem) -> Result<MomentSet> {
    let n = field.norm();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::Precondition(format!("field norm is {n}, expected 1")));
    }
    let grid = field.grid();
    let dz = grid.spacing();
    let psi = field.amplitudes();
    let hbar = unit.hbar;

    let mut mean_z = 0.0;
    for (j, a) in psi.iter().enumerate() {
        mean_z += grid.point(j) * a.norm_sqr();
    }
    mean_z *= dz;
    let mut var_z = 0.0;
    for (j, a) in psi.iter().enumerate() {
        let u = grid.point(j) - mean_z;
        var_z += u * u * a.norm_sqr();
    }
    var_z *= dz;

    let mut spec = psi.to_vec();
    spectral.forward(&mut spec);
    let nyq = spectral.nyquist_index();
    let k = spectral.wavenumbers();
    let total: f64 = spec.iter().map(|a| a.norm_sqr()).sum();
    let mut mean_k = 0.0;
    for (j, (a, &kj)) in spec.iter().zip(k).enumerate() {
        if j != nyq {
            mean_k += kj * a.norm_sqr();
        }
    }
    mean_k /= total;
    let mut var_k = 0.0;
    for (a, &kj) in spec.iter().zip(k) {
        let q = kj - mean_k;
        var_k += q * q * a.norm_sqr();
    }
    var_k /= total;

    // Re <psi| (z - <z>) p |psi>, with p psi formed spectrally.
    let mut p_psi = spec;
    for (j, (a, &kj)) in p_psi.iter_mut().zip(k).enumerate() {
        *a = if j == nyq { Complex64::new(0.0, 0.0) } else { *a * (hbar * kj) };
    }
    spectral.inverse(&mut p_psi);
    let mut cov = 0.0;
    for (j, (a, b)) in psi.iter().zip(&p_psi).enumerate() {
        cov += (grid.point(j) - mean_z) * (a.conj() * b).re;
    }
    cov *= dz;

    Ok(MomentSet {
        mean_z,
        mean_p: hbar * mean_k,
        var_z,
        var_p: hbar * hbar * var_k,
        cov_zp: cov,
    })
}

/// Moments of the diagonal mixture: each peak weighted by `|c_n|^2`, cross terms dropped.
pub fn mixture_moments(spec: &WavepacketSpec, unit: &UnitSystem) -> Result<MomentSet> {
    let (wp, wm) = branch_weights(spec)?;
    let (lo, hi) = spec.peak_centres();
    let mean_z = wp * lo + wm * hi;
    let w0 = spec.delta0;
    let second = 0.5 * w0 * w0 + wp * lo * lo + wm * hi * hi;
    Ok(MomentSet {
        mean_z,
        mean_p: 0.0,
        var_z: second - mean_z * mean_z,
        var_p: unit.hbar * unit.hbar / (2.0 * w0 * w0),
        cov_zp: 0.0,
    })
}

/// Normalized diagonal weights `(|c+|^2, |c-|^2) / (|c+|^2 + |c-|^2)`.
pub fn branch_weights(spec: &WavepacketSpec) -> Result<(f64, f64)> {
    if spec.kind() == StateKind::Gaussian {
        return Err(Error::Unsupported(
            "mixture is undefined for a single-branch Gaussian".into(),
        ));
    }
    let (cp, cm) = spec.coefficients();
    let total = cp.norm_sqr() + cm.norm_sqr();
    Ok((cp.norm_sqr() / total, cm.norm_sqr() / total))
}

/// The two single-peak Gaussian branches of a cat, `(c+ branch, c- branch)`.
pub fn branches(spec: &WavepacketSpec) -> Result<(WavepacketSpec, WavepacketSpec)> {
    branch_weights(spec)?;
    let (lo, hi) = spec.peak_centres();
    Ok((
        WavepacketSpec::gaussian(lo, spec.delta0)?,
        WavepacketSpec::gaussian(hi, spec.delta0)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    Position,
    Momentum,
}

/// Pure-state mean minus diagonal-mixture mean: the off-diagonal contribution.
pub fn interference_gap(spec: &WavepacketSpec, observable: Observable, unit: &UnitSystem) -> Result<f64> {
    let mix = mixture_moments(spec, unit)?;
    let pure = analytic_moments(spec, unit);
    Ok(match observable {
        Observable::Position => pure.mean_z - mix.mean_z,
        Observable::Momentum => pure.mean_p - mix.mean_p,
    })
}
