//! One-dimensional parameter sweeps over a base mission.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::config::MissionConfig;
use super::run::{harvest_point, run_mission, travel_point, weight};
use crate::energy::hover_energy;
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::maneuver::{balance_feasible, hover_velocity, max_thrust};
use crate::par::{self, Execution};
use crate::powertrain::energy_constants;
use crate::profile::PowerProfile;
use crate::wpt::SourcePolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepVariable {
    /// Commanded rotor velocity used in place of `v_max`, rad/s.
    RotorVelocity,
    /// Displacement along one axis from the start, m.
    DistanceX,
    DistanceY,
    DistanceZ,
    /// Wind force along one axis added to the weight, N.
    WindX,
    WindY,
    WindZ,
    /// Height of the UAV straight above the laser source, m.
    SourceDistance,
    /// Constant source power with the UAV at the destination, W.
    SourcePower,
    /// Capacity of both packs, A·s.
    BatterySize,
}

impl SweepVariable {
    pub const ALL: [SweepVariable; 10] = [
        SweepVariable::RotorVelocity,
        SweepVariable::DistanceX,
        SweepVariable::DistanceY,
        SweepVariable::DistanceZ,
        SweepVariable::WindX,
        SweepVariable::WindY,
        SweepVariable::WindZ,
        SweepVariable::SourceDistance,
        SweepVariable::SourcePower,
        SweepVariable::BatterySize,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::RotorVelocity => "rotor-velocity",
            SweepVariable::DistanceX => "distance-x",
            SweepVariable::DistanceY => "distance-y",
            SweepVariable::DistanceZ => "distance-z",
            SweepVariable::WindX => "wind-x",
            SweepVariable::WindY => "wind-y",
            SweepVariable::WindZ => "wind-z",
            SweepVariable::SourceDistance => "source-distance",
            SweepVariable::SourcePower => "source-power",
            SweepVariable::BatterySize => "battery-size",
        }
    }

    /// Header of the swept column.
    pub fn column(self) -> &'static str {
        match self {
            SweepVariable::RotorVelocity => "v_r_rad_per_s",
            SweepVariable::DistanceX | SweepVariable::DistanceY | SweepVariable::DistanceZ => "distance_m",
            SweepVariable::WindX | SweepVariable::WindY | SweepVariable::WindZ => "wind_N",
            SweepVariable::SourceDistance => "source_distance_m",
            SweepVariable::SourcePower => "p_source_set_W",
            SweepVariable::BatterySize => "capacity_A_s",
        }
    }

    /// Output column headers, unit-suffixed.
    pub fn outputs(self) -> &'static [&'static str] {
        match self {
            SweepVariable::RotorVelocity
            | SweepVariable::DistanceX
            | SweepVariable::DistanceY
            | SweepVariable::DistanceZ => &["tau14_s", "e_travel_J"],
            SweepVariable::WindX | SweepVariable::WindY | SweepVariable::WindZ => {
                &["e_hover_J", "hover_velocity_rad_per_s", "balance_feasible"]
            }
            SweepVariable::SourceDistance | SweepVariable::SourcePower => {
                &["nu", "p_source_W", "p_harvested_W", "e_harvested_J", "zeta"]
            }
            SweepVariable::BatterySize => &[
                "gamma_travel",
                "gamma_hover_comm",
                "gamma_motion",
                "gamma_charging",
                "charge_gain",
            ],
        }
    }

    fn axis(self) -> Vec3 {
        match self {
            SweepVariable::DistanceX | SweepVariable::WindX => Vec3::X,
            SweepVariable::DistanceY | SweepVariable::WindY => Vec3::Y,
            _ => Vec3::Z,
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown sweep variable `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
    pub config: MissionConfig,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::invalid("grid", "must not be empty"));
        }
        if self.grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("grid", "must be finite"));
        }
        let up = self.grid.windows(2).all(|w| w[1] > w[0]);
        let down = self.grid.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(Error::invalid("grid", "must be strictly monotone"));
        }
        self.config.validate()
    }
}

/// `n` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|k| {
                if k == n - 1 {
                    stop
                } else {
                    start + (stop - start) * k as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub x: f64,
    /// NaN where the point failed.
    pub values: Vec<f64>,
    /// Error code of a failed point.
    pub error: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub variable: SweepVariable,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Column `name` across all rows.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.variable.outputs().iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r.values[k]).collect())
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    run_sweep_with(spec, Execution::default())
}

/// Evaluates every grid point, in parallel unless `exec` says otherwise.
/// Rows come back in grid order.
pub fn run_sweep_with(spec: &SweepSpec, exec: Execution) -> Result<SweepTable> {
    spec.validate()?;
    let width = spec.variable.outputs().len();
    let rows = par::map(&spec.grid, exec, |&x| match evaluate(spec.variable, &spec.config, x) {
        Ok(values) => SweepRow { x, values, error: None },
        Err(Partial { values, error }) => SweepRow {
            x,
            values: values.unwrap_or_else(|| vec![f64::NAN; width]),
            error: Some(error.code()),
        },
    });
    Ok(SweepTable {
        variable: spec.variable,
        rows,
    })
}

/// A failed point, possibly with the columns that could still be computed.
struct Partial {
    values: Option<Vec<f64>>,
    error: Error,
}

impl From<Error> for Partial {
    fn from(error: Error) -> Self {
        Partial { values: None, error }
    }
}

fn evaluate(var: SweepVariable, base: &MissionConfig, x: f64) -> std::result::Result<Vec<f64>, Partial> {
    use SweepVariable::*;
    let mut cfg = base.clone();
    match var {
        RotorVelocity => {
            cfg.airframe.v_max = x;
            let displacement = cfg.destination - cfg.start;
            let (plan, e, _) = travel_point(displacement, cfg.external_force, &cfg.airframe, &cfg, cfg.stage2_mode)?;
            Ok(vec![plan.travel_time(), e])
        }
        DistanceX | DistanceY | DistanceZ => {
            let (plan, e, _) = travel_point(var.axis() * x, cfg.external_force, &cfg.airframe, &cfg, cfg.stage2_mode)?;
            Ok(vec![plan.travel_time(), e])
        }
        WindX | WindY | WindZ => {
            let f_ext = weight(&cfg.airframe) + var.axis() * x;
            let feasible = balance_feasible(cfg.destination - cfg.start, f_ext, max_thrust(&cfg.airframe));
            let v_h = hover_velocity(f_ext, cfg.airframe.lift_coeff);
            let flag = if feasible { 1.0 } else { 0.0 };
            match hover_energy(cfg.hover_duration, f_ext, &cfg.airframe, &energy_constants(&cfg.motor)) {
                Ok(e) => Ok(vec![e, v_h, flag]),
                Err(error) => Err(Partial {
                    values: Some(vec![f64::NAN, v_h, flag]),
                    error,
                }),
            }
        }
        SourceDistance | SourcePower => {
            let pos = if var == SourceDistance {
                if !(x >= 0.0) {
                    return Err(Error::invalid("source distance", "must be ≥ 0").into());
                }
                cfg.dlc.source_position + Vec3::Z * x
            } else {
                if !(x >= 0.0) {
                    return Err(Error::invalid("source power", "must be ≥ 0").into());
                }
                cfg.source = SourcePolicy::Fixed(PowerProfile::Constant(x));
                cfg.destination
            };
            cfg.wpt_enabled = true;
            let w = harvest_point(&cfg, &cfg.source, pos)?;
            Ok(vec![w.nu, w.p_source, w.p_harvested, w.e_harvested, w.zeta])
        }
        BatterySize => {
            cfg.battery.capacity = x;
            let run = run_mission(&cfg)?;
            let r = &run.battery.phase_ratios;
            Ok(vec![
                r[0].motion_battery,
                r[1].motion_battery,
                run.battery.gamma[0],
                run.battery.gamma[1],
                run.battery.charge_gain,
            ])
        }
    }
}
