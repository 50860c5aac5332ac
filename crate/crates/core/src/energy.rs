//! Consumed-energy accounting: travel, hover and communication.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::maneuver::{hover_velocity, AirframeParams, ManeuverPlan};
use crate::powertrain::MotorEnergyConstants;
use crate::profile::{trapezoid, PowerProfile};

/// Standard gravity used to turn mass into weight, m/s².
pub const GRAVITY: f64 = 9.8;

/// Energy breakdown of one mission, joules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub e_travel: f64,
    pub e_hover: f64,
    pub e_comm: f64,
    pub e_harvested: f64,
    pub e_consumed_total: f64,
    /// Travel energy of stages 1..=5.
    pub per_stage: [f64; 5],
}

impl EnergyReport {
    pub fn new(per_stage: [f64; 5], e_hover: f64, e_comm: f64, e_harvested: f64) -> Result<Self> {
        let e_travel = per_stage.iter().sum::<f64>();
        let report = Self {
            e_travel,
            e_hover,
            e_comm,
            e_harvested,
            e_consumed_total: e_travel + e_hover + e_comm,
            per_stage,
        };
        report.check()?;
        Ok(report)
    }

    /// Re-asserts the decomposition `E_c = E_trav + E_hov + E_comm`.
    pub fn check(&self) -> Result<()> {
        let parts = [self.e_travel, self.e_hover, self.e_comm];
        if parts.iter().chain(&self.per_stage).any(|&e| !(e >= 0.0)) {
            return Err(Error::Numerical("negative consumed energy component".into()));
        }
        if self.e_consumed_total != self.e_travel + self.e_hover + self.e_comm
            || self.e_travel != self.per_stage.iter().sum::<f64>()
        {
            return Err(Error::Numerical("energy decomposition does not add up".into()));
        }
        Ok(())
    }
}

/// Communication power towards `U` ground nodes over an active window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommSchedule {
    pub node_powers: Vec<PowerProfile>,
    pub t0: f64,
    pub tf: f64,
}

impl CommSchedule {
    pub fn constant(node_powers: &[f64], t0: f64, tf: f64) -> Self {
        Self {
            node_powers: node_powers.iter().map(|&w| PowerProfile::Constant(w)).collect(),
            t0,
            tf,
        }
    }

    pub fn idle() -> Self {
        Self {
            node_powers: Vec::new(),
            t0: 0.0,
            tf: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tf >= self.t0) {
            return Err(Error::invalid("comm", "active window must satisfy t_f ≥ t_0"));
        }
        self.node_powers.iter().try_for_each(PowerProfile::validate)
    }

    /// Total power `P_U(t)`, zero outside the active window.
    pub fn total_power(&self, t: f64) -> f64 {
        if t < self.t0 || t > self.tf {
            return 0.0;
        }
        self.node_powers.iter().map(|p| p.at(t)).sum()
    }
}

/// Stage energy with the rotor pattern `{0, v/√2, v/√2, v}`; the stopped
/// rotor draws nothing.
pub fn stage_energy_attitude(duration: f64, v_max: f64, c: &MotorEnergyConstants) -> f64 {
    let v = v_max;
    let bracket = 3.0 * c.get(1)
        + (1.0 + SQRT_2) * c.get(2) * v
        + 2.0 * c.get(3) * v * v
        + (1.0 + 1.0 / SQRT_2) * c.get(4) * v.powi(3)
        + 1.5 * c.get(5) * v.powi(4);
    duration * bracket
}

/// Stage energy with all four rotors at `v_max`.
pub fn stage_energy_translation(duration: f64, v_max: f64, c: &MotorEnergyConstants) -> f64 {
    duration * 4.0 * c.steady_power(v_max)
}

/// Travel energy of stages 1..=5 and its per-stage split.
pub fn travel_energy(plan: &ManeuverPlan, c: &MotorEnergyConstants) -> (f64, [f64; 5]) {
    let mut per_stage = [0.0; 5];
    for (k, e) in per_stage.iter_mut().enumerate() {
        let stage = k as u8 + 1;
        let d = plan.stage_duration(stage);
        *e = if stage % 2 == 1 {
            stage_energy_attitude(d, plan.v_max, c)
        } else {
            stage_energy_translation(d, plan.v_max, c)
        };
    }
    (per_stage.iter().sum(), per_stage)
}

/// Energy to hold position against `f_ext` for `duration` seconds.
pub fn hover_energy(
    duration: f64,
    f_ext: Vec3,
    airframe: &AirframeParams,
    c: &MotorEnergyConstants,
) -> Result<f64> {
    let v_hover = hover_velocity(f_ext, airframe.lift_coeff);
    if v_hover > airframe.v_max {
        return Err(Error::InfeasibleHover {
            v_hover,
            v_max: airframe.v_max,
        });
    }
    let ratio = f_ext.norm() / (4.0 * airframe.lift_coeff);
    let sum: f64 = (1..=5)
        .map(|i| c.get(i) * ratio.powf((i as f64 - 1.0) / 2.0))
        .sum();
    Ok(duration * 4.0 * sum)
}

/// Communication energy `∫ P_U dt`; exact for constant powers, trapezoid
/// with step `dt` otherwise.
pub fn comm_energy(sched: &CommSchedule, dt: f64) -> f64 {
    let span = sched.tf - sched.t0;
    if span <= 0.0 {
        return 0.0;
    }
    if sched.node_powers.iter().all(PowerProfile::is_constant) {
        sched.node_powers.iter().map(|p| p.at(sched.t0)).sum::<f64>() * span
    } else {
        trapezoid(|t| sched.total_power(t), sched.t0, sched.tf, dt)
    }
}
