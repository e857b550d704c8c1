//! Galilean preparation: equal mean positions and equal mean velocities
//! `<p>/m_i` for two particles of different mass.
//!
//! The free parameters for the second particle are its centre `z0` and, for a
//! cat, the relative phase `theta`. Moduli and geometry stay fixed. The mean
//! momentum of a cat is `K sin(theta) / (B + C cos(theta))`, increasing on
//! `(-theta*, theta*)` with `cos(theta*) = -C/B`, which is the branch searched.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{analytic_moments, StateKind, WavepacketSpec};
use crate::units::{MassPair, UnitSystem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreparationTarget {
    pub mean_z_target: f64,
    pub velocity_target: f64,
}

impl PreparationTarget {
    pub fn of(spec: &WavepacketSpec, mass: &MassPair, unit: &UnitSystem) -> Self {
        let m = analytic_moments(spec, unit);
        PreparationTarget {
            mean_z_target: m.mean_z,
            velocity_target: m.mean_p / mass.m_inertial,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub matched: bool,
    pub position_residual: f64,
    pub velocity_residual: f64,
}

/// Compares mean positions (in units of `tol * length_ref`) and mean
/// velocities (in units of `tol * hbar / (mass_ref length_ref)`).
pub fn check_matched(
    spec1: &WavepacketSpec,
    mass1: &MassPair,
    spec2: &WavepacketSpec,
    mass2: &MassPair,
    tol: f64,
    unit: &UnitSystem,
) -> MatchReport {
    let a = PreparationTarget::of(spec1, mass1, unit);
    let b = PreparationTarget::of(spec2, mass2, unit);
    let position_residual = (a.mean_z_target - b.mean_z_target).abs();
    let velocity_residual = (a.velocity_target - b.velocity_target).abs();
    MatchReport {
        matched: position_residual <= tol * unit.length_ref
            && velocity_residual <= tol * unit.velocity_ref(),
        position_residual,
        velocity_residual,
    }
}

/// Edge of the monotone phase branch, `arccos(-C/B)`, in `[pi/2, pi)`.
pub fn phase_branch_edge(family: &WavepacketSpec) -> f64 {
    let (cp, cm) = family.coefficients();
    let (rp, rm) = (cp.norm(), cm.norm());
    let x = family.delta() / family.delta0();
    let c_over_b = 2.0 * rp * rm * (-x * x).exp() / (rp * rp + rm * rm);
    (-c_over_b).acos()
}

/// Largest `|<p>|/m_i` reachable by the family by tuning its phase.
pub fn max_velocity(family: &WavepacketSpec, mass: &MassPair, unit: &UnitSystem) -> Result<f64> {
    match family.kind() {
        StateKind::Gaussian => Ok(0.0),
        StateKind::Cat => {
            let edge = family.with_theta(phase_branch_edge(family))?;
            Ok(analytic_moments(&edge, unit).mean_p.abs() / mass.m_inertial)
        }
    }
}

/// Returns a member of `family` whose mean position and velocity match those
/// of `spec1`. The phase is found by bisection; among solutions the one with
/// smallest `|theta|` is returned.
pub fn match_second_particle(
    spec1: &WavepacketSpec,
    mass1: &MassPair,
    family: &WavepacketSpec,
    mass2: &MassPair,
    unit: &UnitSystem,
) -> Result<WavepacketSpec> {
    let target = PreparationTarget::of(spec1, mass1, unit);
    let p_target = target.velocity_target * mass2.m_inertial;
    let v_max = max_velocity(family, mass2, unit)?;

    let phased = match family.kind() {
        StateKind::Gaussian => {
            if target.velocity_target != 0.0 {
                return Err(Error::Infeasible {
                    target: target.velocity_target,
                    v_max,
                });
            }
            *family
        }
        StateKind::Cat => {
            if target.velocity_target.abs() > v_max * (1.0 + 1e-12) {
                return Err(Error::Infeasible {
                    target: target.velocity_target,
                    v_max,
                });
            }
            if p_target == 0.0 {
                family.with_theta(0.0)?
            } else if v_max == 0.0 {
                return Err(Error::InvalidSpec(
                    "family has a vanishing modulus and cannot carry momentum".into(),
                ));
            } else {
                let edge = phase_branch_edge(family);
                let theta = bisect_phase(family, p_target, -edge, edge, unit)?;
                family.with_theta(theta)?
            }
        }
    };

    // <z> depends on theta through the normalization but <p> does not depend on z0.
    let offset = analytic_moments(&phased, unit).mean_z - phased.z0();
    phased.with_z0(target.mean_z_target - offset)
}

fn bisect_phase(
    family: &WavepacketSpec,
    p_target: f64,
    mut lo: f64,
    mut hi: f64,
    unit: &UnitSystem,
) -> Result<f64> {
    let momentum = |theta: f64| -> Result<f64> {
        Ok(analytic_moments(&family.with_theta(theta)?, unit).mean_p - p_target)
    };
    let f_lo = momentum(lo)?;
    let f_hi = momentum(hi)?;
    if f_lo > 0.0 {
        return Ok(lo);
    }
    if f_hi < 0.0 {
        return Ok(hi);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if momentum(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (a, b) = (momentum(lo)?.abs(), momentum(hi)?.abs());
    Ok(if a <= b { lo } else { hi })
}
