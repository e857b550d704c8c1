//! Complex wavefunctions sampled on a [`SpatialGrid`] and the spectral
//! machinery that acts on them.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;

/// Number of cells at each edge watched by the boundary guard.
pub const GUARD_CELLS: usize = 5;
/// Probability allowed inside the guard band before a run aborts.
pub const GUARD_PROBABILITY: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    grid: SpatialGrid,
    amplitudes: Vec<Complex64>,
}

impl GridField {
    pub fn new(grid: SpatialGrid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::Config(format!(
                "{} amplitudes for a grid of {} points",
                amplitudes.len(),
                grid.len()
            )));
        }
        Ok(GridField { grid, amplitudes })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: SpatialGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let amplitudes = (0..grid.len()).map(|j| f(grid.point(j))).collect();
        GridField { grid, amplitudes }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// Rectangle-rule L2 norm `sqrt(sum |psi_j|^2 dz)`.
    pub fn norm(&self) -> f64 {
        let s: f64 = self.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        (s * self.grid.spacing()).sqrt()
    }

    /// Copy rescaled to unit norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Degenerate(format!("cannot normalize a field of norm {n}")));
        }
        let inv = 1.0 / n;
        Ok(GridField {
            grid: self.grid.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a * inv).collect(),
        })
    }

    /// Multiplies every amplitude by `exp(i phase)`.
    pub fn with_global_phase(&self, phase: f64) -> Self {
        let w = Complex64::from_polar(1.0, phase);
        GridField {
            grid: self.grid.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a * w).collect(),
        }
    }

    /// Probability in the outermost `cells` samples at each edge.
    pub fn edge_probability(&self, cells: usize) -> f64 {
        let n = self.amplitudes.len();
        let cells = cells.min(n / 2);
        let head: f64 = self.amplitudes[..cells].iter().map(|a| a.norm_sqr()).sum();
        let tail: f64 = self.amplitudes[n - cells..].iter().map(|a| a.norm_sqr()).sum();
        (head + tail) * self.grid.spacing()
    }

    /// Rectangle-rule L2 distance to `other` on the same grid.
    pub fn l2_distance(&self, other: &GridField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::Precondition("fields live on different grids".into()));
        }
        let s: f64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((s * self.grid.spacing()).sqrt())
    }

    /// Probability density `|psi_j|^2`.
    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Rectangle-rule L2 norm of `field`.
pub fn norm(field: &GridField) -> f64 {
    field.norm()
}

/// Forward and inverse transforms for one grid, plus the wavenumber table.
///
/// The inverse transform is normalized so that `inverse(forward(x)) == x`.
#[derive(Clone)]
pub struct Spectral {
    grid: SpatialGrid,
    k: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Spectral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: &SpatialGrid) -> Self {
        let mut planner = FftPlanner::new();
        Spectral {
            grid: grid.clone(),
            k: grid.wavenumbers(),
            forward: planner.plan_fft_forward(grid.len()),
            inverse: planner.plan_fft_inverse(grid.len()),
        }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.forward.process(data);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inverse.process(data);
        let inv = 1.0 / data.len() as f64;
        for a in data.iter_mut() {
            *a *= inv;
        }
    }

    /// Index of the unpaired Nyquist mode, zeroed by odd-order derivatives.
    pub fn nyquist_index(&self) -> usize {
        self.k.len() / 2
    }

    /// Spectral first derivative `d psi / dz`.
    pub fn derivative(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut buf = psi.to_vec();
        self.forward(&mut buf);
        let nyq = self.nyquist_index();
        for (j, (a, &k)) in buf.iter_mut().zip(&self.k).enumerate() {
            *a = if j == nyq {
                Complex64::new(0.0, 0.0)
            } else {
                *a * Complex64::new(0.0, k)
            };
        }
        self.inverse(&mut buf);
        buf
    }

    /// Basis row `exp(i k (z - z_min)) / n` for evaluating a spectrum at `z`.
    pub fn evaluation_row(&self, z: f64) -> Vec<Complex64> {
        let x = z - self.grid.z_min();
        let inv = 1.0 / self.k.len() as f64;
        self.k
            .iter()
            .map(|&k| Complex64::from_polar(inv, k * x))
            .collect()
    }

    /// Value and first derivative at an arbitrary `z` from a forward spectrum.
    pub fn evaluate(&self, spectrum: &[Complex64], row: &[Complex64]) -> (Complex64, Complex64) {
        let nyq = self.nyquist_index();
        let mut value = Complex64::new(0.0, 0.0);
        let mut deriv = Complex64::new(0.0, 0.0);
        for (j, ((s, r), &k)) in spectrum.iter().zip(row).zip(&self.k).enumerate() {
            let term = s * r;
            value += term;
            if j != nyq {
                deriv += term * Complex64::new(0.0, k);
            }
        }
        (value, deriv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> SpatialGrid {
        SpatialGrid::new(-10.0, 10.0, 256).unwrap()
    }

    #[test]
    fn constant_field_has_unit_norm() {
        let g = grid();
        let c = 1.0 / g.length().sqrt();
        let f = GridField::from_fn(g, |_| Complex64::new(c, 0.0));
        assert!((f.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_field_has_zero_norm() {
        let f = GridField::from_fn(grid(), |_| Complex64::new(0.0, 0.0));
        assert_eq!(norm(&f), 0.0);
        assert!(matches!(f.normalized(), Err(Error::Degenerate(_))));
    }

    #[test]
    fn norm_ignores_global_phase() {
        let f = GridField::from_fn(grid(), |z| Complex64::new((-z * z).exp(), z.sin()));
        let g = f.with_global_phase(1.234);
        assert!((f.norm() - g.norm()).abs() < 1e-14);
    }

    #[test]
    fn derivative_of_periodic_sine() {
        let g = grid();
        let k = 3.0 * g.dk();
        let f = GridField::from_fn(g.clone(), |z| Complex64::new((k * z).sin(), 0.0));
        let s = Spectral::new(&g);
        let d = s.derivative(f.amplitudes());
        for (j, v) in d.iter().enumerate() {
            let z = g.point(j);
            assert!((v.re - k * (k * z).cos()).abs() < 1e-12);
            assert!(v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn off_grid_evaluation() {
        let g = grid();
        let f = GridField::from_fn(g.clone(), |z| Complex64::new((-(z * z)).exp(), 0.0));
        let s = Spectral::new(&g);
        let mut spec = f.amplitudes().to_vec();
        s.forward(&mut spec);
        let z = 0.3 + PI / 100.0;
        let (v, d) = s.evaluate(&spec, &s.evaluation_row(z));
        assert!((v.re - (-(z * z)).exp()).abs() < 1e-12);
        assert!((d.re + 2.0 * z * (-(z * z)).exp()).abs() < 1e-12);
    }

    #[test]
    fn round_trip_transform() {
        let g = grid();
        let f = GridField::from_fn(g.clone(), |z| Complex64::new(z.cos(), (-(z * z)).exp()));
        let s = Spectral::new(&g);
        let mut buf = f.amplitudes().to_vec();
        s.forward(&mut buf);
        s.inverse(&mut buf);
        for (a, b) in buf.iter().zip(f.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
