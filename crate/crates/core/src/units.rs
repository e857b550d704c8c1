//! Unit system and particle masses.
//!
//! Simulations run in dimensionless units where `hbar`, the reference mass and
//! the reference length default to one. Physical inputs are mapped onto these
//! through [`SiScales`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub hbar: f64,
    /// Gravitational field strength.
    pub g: f64,
    pub length_ref: f64,
    pub mass_ref: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        UnitSystem {
            hbar: 1.0,
            g: 1.0,
            length_ref: 1.0,
            mass_ref: 1.0,
        }
    }
}

impl UnitSystem {
    pub fn new(hbar: f64, g: f64, length_ref: f64, mass_ref: f64) -> Result<Self> {
        let u = UnitSystem {
            hbar,
            g,
            length_ref,
            mass_ref,
        };
        u.validate()?;
        Ok(u)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(Error::Config(format!("hbar must be positive, got {}", self.hbar)));
        }
        if !(self.g.is_finite() && self.g >= 0.0) {
            return Err(Error::Config(format!("g must be non-negative, got {}", self.g)));
        }
        if !(self.length_ref.is_finite() && self.length_ref > 0.0) {
            return Err(Error::Config("length_ref must be positive".into()));
        }
        if !(self.mass_ref.is_finite() && self.mass_ref > 0.0) {
            return Err(Error::Config("mass_ref must be positive".into()));
        }
        Ok(())
    }

    /// Classical fall time `sqrt(2 z0 / g)` from height `z0`; `None` when `g = 0`.
    pub fn fall_time(&self, z0: f64) -> Option<f64> {
        (self.g > 0.0 && z0 >= 0.0).then(|| (2.0 * z0 / self.g).sqrt())
    }

    /// Quantum diffusion coefficient `hbar / m`.
    pub fn diffusion(&self, mass: f64) -> f64 {
        self.hbar / mass
    }

    /// Reference momentum `hbar / length_ref`.
    pub fn momentum_ref(&self) -> f64 {
        self.hbar / self.length_ref
    }

    /// Reference velocity `hbar / (mass_ref length_ref)`.
    pub fn velocity_ref(&self) -> f64 {
        self.hbar / (self.mass_ref * self.length_ref)
    }
}

/// Scale factors from SI into simulation units: one simulation length unit is
/// `length_m` metres, and so on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiScales {
    pub length_m: f64,
    pub mass_kg: f64,
    pub time_s: f64,
}

pub const HBAR_SI: f64 = 1.054_571_817e-34;

impl SiScales {
    /// Unit system carrying `hbar` and `g` expressed in the scaled units.
    pub fn unit_system(&self, g_si: f64) -> Result<UnitSystem> {
        let hbar = HBAR_SI * self.time_s / (self.mass_kg * self.length_m * self.length_m);
        let g = g_si * self.time_s * self.time_s / self.length_m;
        UnitSystem::new(hbar, g, 1.0, 1.0)
    }

    /// Natural scales for a particle of mass `mass_kg` in field `g_si`: the
    /// resulting system has `hbar = g = m = 1`.
    pub fn natural(mass_kg: f64, g_si: f64) -> Self {
        let length_m = (HBAR_SI * HBAR_SI / (mass_kg * mass_kg * g_si)).cbrt();
        let time_s = (length_m / g_si).sqrt();
        SiScales {
            length_m,
            mass_kg,
            time_s,
        }
    }
}

/// Inertial and gravitational mass of one test particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassPair {
    pub m_inertial: f64,
    pub m_gravitational: f64,
}

impl MassPair {
    pub fn new(m_inertial: f64, m_gravitational: f64) -> Result<Self> {
        for (name, m) in [("m_inertial", m_inertial), ("m_gravitational", m_gravitational)] {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {m}")));
            }
        }
        let ratio = m_gravitational / m_inertial;
        if !ratio.is_finite() {
            return Err(Error::Config("mass ratio is not finite".into()));
        }
        Ok(MassPair {
            m_inertial,
            m_gravitational,
        })
    }

    pub fn equal(m: f64) -> Result<Self> {
        Self::new(m, m)
    }

    /// `m_inertial / m_gravitational`, the quantity the classical fall time depends on.
    pub fn inertial_over_gravitational(&self) -> f64 {
        self.m_inertial / self.m_gravitational
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.m_inertial * factor, self.m_gravitational * factor)
    }
}
