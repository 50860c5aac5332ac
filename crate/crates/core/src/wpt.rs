//! Distributed laser charging: path attenuation, harvested power and the
//! source-power cap set by the battery charge current.
//!
//! Harvested energy integrates the clamped harvested power with the
//! transmission efficiency inside the integral, i.e.
//! `a₁a₂∫ν(t)P_s(t)dt + a₂b₁∫ν(t)dt + b₂(t_f − t₀)` before clamping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::profile::{trapezoid, PowerProfile};

/// Link constants of a laser charging source and its receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DlcParams {
    pub a1: f64,
    pub a2: f64,
    /// Curve-fit offset, W.
    pub b1: f64,
    /// Curve-fit offset, W.
    pub b2: f64,
    pub sigma: f64,
    /// Reference wavelength χ, m.
    pub chi: f64,
    /// Visibility κ, m.
    pub visibility: f64,
    /// Laser wavelength λ, m.
    pub wavelength: f64,
    /// Size distribution ρ of the scattering particles.
    pub size_distribution: f64,
    pub source_position: Vec3,
}

impl DlcParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.a1 * self.a2 > 0.0) {
            return Err(Error::invalid("a1*a2", "must be positive"));
        }
        for (name, v) in [
            ("visibility", self.visibility),
            ("wavelength", self.wavelength),
            ("chi", self.chi),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !self.source_position.is_finite() {
            return Err(Error::invalid("source_position", "must be finite"));
        }
        Ok(())
    }
}

/// One point of a harvesting trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarvestSample {
    pub t: f64,
    pub p_source: f64,
    pub p_harvested: f64,
    pub nu: f64,
}

/// Attenuation α = (σ/κ)(λ/χ)^(−ρ), 1/m.
pub fn attenuation_coeff(p: &DlcParams) -> f64 {
    p.sigma / p.visibility * (p.wavelength / p.chi).powf(-p.size_distribution)
}

/// Transmission efficiency `exp(−α ‖w − w_s‖)`.
pub fn transmission_efficiency(uav_pos: Vec3, p: &DlcParams) -> f64 {
    (-attenuation_coeff(p) * uav_pos.distance(p.source_position)).exp()
}

/// Affine fit before clamping; negative at small source power.
pub fn raw_harvested_power(p_source: f64, nu: f64, p: &DlcParams) -> f64 {
    p.a1 * p.a2 * nu * p_source + p.a2 * p.b1 * nu + p.b2
}

/// Harvested power, clamped at zero.
pub fn harvested_power(p_source: f64, nu: f64, p: &DlcParams) -> f64 {
    raw_harvested_power(p_source, nu, p).max(0.0)
}

/// Charging power cap `I_ch · e_nom`.
pub fn charge_power_cap(charge_current: f64, nominal_voltage: f64) -> f64 {
    charge_current * nominal_voltage
}

/// Largest source power whose harvested power stays within `p_charge_cap`.
pub fn max_source_power(p_charge_cap: f64, nu: f64, p: &DlcParams) -> Result<f64> {
    if !(nu > 0.0) {
        return Err(Error::NoLineOfSight);
    }
    Ok((p_charge_cap - p.a2 * p.b1 * nu - p.b2) / (p.a1 * p.a2 * nu))
}

pub fn sample(t: f64, uav_pos: Vec3, p_source: f64, p: &DlcParams) -> HarvestSample {
    let nu = transmission_efficiency(uav_pos, p);
    HarvestSample {
        t,
        p_source,
        p_harvested: harvested_power(p_source, nu, p),
        nu,
    }
}

/// How the source sets its power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourcePolicy {
    Fixed(PowerProfile),
    /// The largest power the receiving battery accepts at the current ν.
    MaxAllowed,
}

impl SourcePolicy {
    /// Source power at `t` given efficiency `nu` and charge power cap `p_ch`.
    pub fn power(&self, t: f64, nu: f64, p_ch: f64, p: &DlcParams) -> Result<f64> {
        match self {
            SourcePolicy::Fixed(profile) => Ok(profile.at(t)),
            SourcePolicy::MaxAllowed => max_source_power(p_ch, nu, p).map(|w| w.max(0.0)),
        }
    }
}

/// Harvested energy over `[t0, tf]` along a trajectory, by the trapezoid
/// rule with step `dt`. `source_power` maps `(t, ν)` to `P_s`.
pub fn harvest_energy(
    trajectory: impl Fn(f64) -> Vec3,
    source_power: impl Fn(f64, f64) -> f64,
    p: &DlcParams,
    t0: f64,
    tf: f64,
    dt: f64,
) -> f64 {
    trapezoid(
        |t| {
            let nu = transmission_efficiency(trajectory(t), p);
            harvested_power(source_power(t, nu), nu, p)
        },
        t0,
        tf,
        dt,
    )
}

/// Closed form for a static UAV under constant source power.
pub fn harvest_energy_static(uav_pos: Vec3, p_source: f64, p: &DlcParams, duration: f64) -> f64 {
    let nu = transmission_efficiency(uav_pos, p);
    harvested_power(p_source, nu, p) * duration.max(0.0)
}
