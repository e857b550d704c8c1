//! Uniform periodic grids.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest grid accepted by [`SpatialGrid::new`].
pub const MIN_POINTS: usize = 16;

/// Uniform grid on the periodic interval `[z_min, z_max)`.
///
/// Sample `j` sits at `z_min + j * spacing`; `z_max` is identified with
/// `z_min`. Wavenumbers follow the discrete Fourier convention
/// `2 pi k / L` with `k` in `[-n/2, n/2)`, stored in transform order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    z_min: f64,
    z_max: f64,
    n_points: usize,
}

impl SpatialGrid {
    pub fn new(z_min: f64, z_max: f64, n_points: usize) -> Result<Self> {
        if !(z_min.is_finite() && z_max.is_finite()) {
            return Err(Error::Config("grid bounds must be finite".into()));
        }
        if z_min >= z_max {
            return Err(Error::Config(format!(
                "grid bounds inverted: z_min = {z_min} must be below z_max = {z_max}"
            )));
        }
        if n_points < MIN_POINTS || !n_points.is_power_of_two() {
            return Err(Error::Config(format!(
                "n_points = {n_points} must be a power of two >= {MIN_POINTS}"
            )));
        }
        Ok(SpatialGrid {
            z_min,
            z_max,
            n_points,
        })
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        self.z_max - self.z_min
    }

    pub fn spacing(&self) -> f64 {
        self.length() / self.n_points as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        self.z_min + j as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.point(j)).collect()
    }

    /// Wavenumber spacing `2 pi / L`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.length()
    }

    /// Nyquist wavenumber `pi n / L`.
    pub fn k_max(&self) -> f64 {
        PI * self.n_points as f64 / self.length()
    }

    /// Wavenumbers in transform order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points as i64;
        let dk = self.dk();
        (0..n)
            .map(|j| if j < n / 2 { j } else { j - n })
            .map(|k| k as f64 * dk)
            .collect()
    }

    /// True when `[a, b]` lies inside the grid with `margin` to spare on both sides.
    pub fn contains_with_margin(&self, a: f64, b: f64, margin: f64) -> bool {
        a - margin >= self.z_min && b + margin <= self.z_max
    }
}

/// Convenience alias matching the grid constructor.
pub fn make_grid(z_min: f64, z_max: f64, n_points: usize) -> Result<SpatialGrid> {
    SpatialGrid::new(z_min, z_max, n_points)
}
