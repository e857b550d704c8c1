use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::evolve::{LinearPotentialParams, DEFAULT_STEPS_PER_FALL};
use crate::grid::SpatialGrid;
use crate::states::{StatePreset, WavepacketSpec};
use crate::units::{MassPair, UnitSystem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleConfig {
    pub spec: WavepacketSpec,
    pub mass: MassPair,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSettings {
    pub z_min: f64,
    pub z_max: f64,
    pub n_points: usize,
}

impl GridSettings {
    pub fn grid(&self) -> Result<SpatialGrid> {
        SpatialGrid::new(self.z_min, self.z_max, self.n_points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Fixed step; when absent the step is the fall time over `steps_per_fall`.
    pub dt: Option<f64>,
    pub steps_per_fall: usize,
    pub snapshot_stride: usize,
    pub store_fields: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            dt: None,
            steps_per_fall: DEFAULT_STEPS_PER_FALL,
            snapshot_stride: 64,
            store_fields: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    /// Gravitational masses; the inertial mass of the first particle is held fixed.
    pub masses: Vec<f64>,
    pub states: Vec<StatePreset>,
    /// Relative phases for a theta scan of the first particle's moduli.
    pub thetas: Vec<f64>,
    /// Also run the spectral solver at every mass point.
    pub simulate: bool,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            masses: vec![1.0, 2.0, 4.0, 8.0, 16.0],
            states: StatePreset::ALL.to_vec(),
            thetas: Vec::new(),
            simulate: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub unit: UnitSystem,
    pub particles: Vec<ParticleConfig>,
    /// Acceleration of the comparison frame; defaults to `unit.g`.
    pub frame_acceleration: f64,
    pub z_detector: f64,
    pub grid: Option<GridSettings>,
    pub solver: SolverSettings,
    pub sweep: Option<SweepSettings>,
    /// Gauge the second particle of a pair when the preparation does not match.
    pub auto_match: bool,
    pub match_tolerance: f64,
    pub seed: u64,
    pub threads: usize,
    /// Digest of the text this config was parsed from, if any.
    pub source_digest: Option<String>,
}

impl ExperimentConfig {
    /// One Gaussian at `z0 = 2`, unit masses, detector at the origin.
    pub fn minimal() -> Self {
        ExperimentConfig {
            unit: UnitSystem::default(),
            particles: vec![ParticleConfig {
                spec: WavepacketSpec::gaussian(2.0, 1.0).expect("valid default"),
                mass: MassPair::equal(1.0).expect("valid default"),
            }],
            frame_acceleration: 1.0,
            z_detector: 0.0,
            grid: None,
            solver: SolverSettings::default(),
            sweep: None,
            auto_match: true,
            match_tolerance: 1e-9,
            seed: 0,
            threads: 1,
            source_digest: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.unit.validate()?;
        if self.particles.is_empty() {
            return Err(Error::Config("at least one particle is required".into()));
        }
        if !(self.frame_acceleration.is_finite() && self.frame_acceleration >= 0.0) {
            return Err(Error::Config("frame acceleration must be non-negative".into()));
        }
        if let Some(g) = &self.grid {
            g.grid()?;
        }
        if let Some(dt) = self.solver.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::Config(format!("solver dt must be positive, got {dt}")));
            }
        }
        if self.solver.steps_per_fall == 0 || self.solver.snapshot_stride == 0 {
            return Err(Error::Config("steps_per_fall and snapshot_stride must be positive".into()));
        }
        if let Some(s) = &self.sweep {
            if s.masses.is_empty() && s.states.is_empty() && s.thetas.is_empty() {
                return Err(Error::Config("sweep requested with every axis empty".into()));
            }
            if s.masses.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
                return Err(Error::Config("sweep masses must be positive".into()));
            }
        }
        if self.threads == 0 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        Ok(())
    }

    /// Digest of the source text, or of the canonical JSON form when built in
    /// code. The thread count is left out since results do not depend on it.
    pub fn digest(&self) -> String {
        match &self.source_digest {
            Some(d) => d.clone(),
            None => {
                let mut canonical = self.clone();
                canonical.threads = 0;
                let json = serde_json::to_vec(&canonical).expect("config serializes");
                short_digest(&json)
            }
        }
    }

    pub fn gravity(&self, mass: MassPair) -> Result<LinearPotentialParams> {
        LinearPotentialParams::gravity(mass, self.unit.g)
    }

    pub fn accelerated(&self, mass: MassPair) -> Result<LinearPotentialParams> {
        LinearPotentialParams::accelerated(mass, self.frame_acceleration)
    }
}

/// First 16 hex digits of the SHA-256 of `bytes`.
pub fn short_digest(bytes: &[u8]) -> String {
    let full = hex::encode(Sha256::digest(bytes));
    full[..16].to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_is_valid() {
        let c = ExperimentConfig::minimal();
        c.validate().unwrap();
        assert_eq!(c.digest(), ExperimentConfig::minimal().digest());
        assert_eq!(c.digest().len(), 16);
    }

    #[test]
    fn digest_tracks_content() {
        let a = ExperimentConfig::minimal();
        let mut b = a.clone();
        b.threads = 8;
        assert_eq!(a.digest(), b.digest());
        b.z_detector = 0.5;
        assert_ne!(a.digest(), b.digest());
        b.source_digest = Some("abc".into());
        assert_eq!(b.digest(), "abc");
    }

    #[test]
    fn invalid_settings() {
        let mut c = ExperimentConfig::minimal();
        c.particles.clear();
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::minimal();
        c.solver.dt = Some(-1.0);
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::minimal();
        c.sweep = Some(SweepSettings {
            masses: vec![],
            states: vec![],
            thetas: vec![],
            simulate: false,
        });
        assert!(c.validate().is_err());
    }
}
