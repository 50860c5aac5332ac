//! Mission configuration file: a TOML document whose keys carry their
//! units, plus the bundled presets.

use serde::{Deserialize, Serialize};

use crate::battery::{charge_current_cap, BatteryParams};
use crate::energy::CommSchedule;
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::maneuver::{AirframeParams, StageTwoFormula};
use crate::powertrain::MotorParams;
use crate::profile::PowerProfile;
use crate::wpt::{DlcParams, SourcePolicy};

/// Bundled parameter sets: `(name, description, TOML text)`.
pub const PRESETS: &[(&str, &str, &str)] = &[
    (
        "table1",
        "reference quadrotor, 10 Ah packs, 20 s hover with 5 W comm and laser charging",
        include_str!("../../presets/table1.toml"),
    ),
    (
        "table1-b10800",
        "reference mission on 3 Ah (10800 A·s) packs charged at 10 A",
        include_str!("../../presets/table1-b10800.toml"),
    ),
];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub mission: MissionSection,
    #[serde(default)]
    pub integration: IntegrationSection,
    pub airframe: AirframeSection,
    pub motor: MotorSection,
    #[serde(default)]
    pub comm: CommSection,
    pub dlc: DlcSection,
    pub battery: BatterySection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MissionSection {
    pub start_m: Vec3,
    pub destination_m: Vec3,
    pub external_force_n: Vec3,
    pub hover_duration_s: f64,
    #[serde(default)]
    pub stage2_mode: StageTwoFormula,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationSection {
    pub dt_s: f64,
}

impl Default for IntegrationSection {
    fn default() -> Self {
        Self {
            dt_s: crate::profile::DEFAULT_STEP,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AirframeSection {
    pub lift_coeff_n_s2_per_rad2: f64,
    pub arm_length_m: f64,
    pub inertia_x_kg_m2: f64,
    pub inertia_y_kg_m2: f64,
    pub mass_kg: f64,
    pub v_max_rad_per_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotorSection {
    pub resistance_ohm: f64,
    pub kv_rpm_per_v: f64,
    pub friction_torque_n_m: f64,
    pub drag_coeff_n_m_s2_per_rad2: f64,
    pub damping_n_m_s_per_rad: f64,
    pub rotor_inertia_kg_m2: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommSection {
    pub transceiver_voltage_v: f64,
    /// Window start relative to the start of the hover phase.
    #[serde(default)]
    pub start_s: f64,
    /// Window end relative to the start of the hover phase; defaults to the
    /// hover duration.
    pub end_s: Option<f64>,
    #[serde(default)]
    pub nodes: Vec<NodeSection>,
}

impl Default for CommSection {
    fn default() -> Self {
        Self {
            transceiver_voltage_v: 1.0,
            start_s: 0.0,
            end_s: None,
            nodes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSection {
    pub power_w: PowerProfile,
    #[serde(default = "one")]
    pub count: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SourcePowerField {
    Named(String),
    Power(PowerProfile),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DlcSection {
    #[serde(default = "yes")]
    pub enabled: bool,
    pub a1: f64,
    pub a2: f64,
    pub b1_w: f64,
    pub b2_w: f64,
    pub sigma: f64,
    pub chi_m: f64,
    pub visibility_m: f64,
    pub wavelength_m: f64,
    pub size_distribution: f64,
    pub source_position_m: Vec3,
    pub source_power_w: SourcePowerField,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatterySection {
    pub capacity_a_s: f64,
    pub split: f64,
    pub flow_rate_per_min: f64,
    pub nominal_voltage_v: f64,
    pub c_rating_per_h: f64,
    pub charge_current_a: f64,
    #[serde(default = "full")]
    pub motion_initial_soc: f64,
    #[serde(default = "full")]
    pub charging_initial_soc: f64,
}

fn full() -> f64 {
    1.0
}

/// Everything a mission run needs, in SI units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MissionConfig {
    pub start: Vec3,
    pub destination: Vec3,
    pub external_force: Vec3,
    pub hover_duration: f64,
    pub stage2_mode: StageTwoFormula,
    pub dt: f64,
    pub airframe: AirframeParams,
    pub motor: MotorParams,
    /// Communication window relative to the start of the hover phase.
    pub comm: CommSchedule,
    pub transceiver_voltage: f64,
    pub wpt_enabled: bool,
    pub dlc: DlcParams,
    pub source: SourcePolicy,
    /// Both packs share these parameters.
    pub battery: BatteryParams,
    /// Constant laser charge current I_ch, A.
    pub charge_current: f64,
    pub motion_initial_soc: f64,
    pub charging_initial_soc: f64,
}

impl MissionConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::try_from(file)
    }

    pub fn from_preset(name: &str) -> Result<Self> {
        let (_, _, text) = PRESETS
            .iter()
            .find(|(n, _, _)| *n == name)
            .ok_or_else(|| Error::Config(format!("unknown preset `{name}`")))?;
        Self::from_toml(text)
    }

    /// Checks every parameter block.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("start", self.start),
            ("destination", self.destination),
            ("external_force", self.external_force),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        if !(self.hover_duration >= 0.0) {
            return Err(Error::invalid("hover_duration", "must be ≥ 0"));
        }
        if !(self.dt > 0.0) {
            return Err(Error::invalid("dt", "must be positive"));
        }
        self.airframe.validate()?;
        self.motor.validate()?;
        self.comm.validate()?;
        if self.comm.t0 < 0.0 || self.comm.tf > self.hover_duration {
            return Err(Error::invalid(
                "comm",
                "window must lie within the hover phase",
            ));
        }
        if !(self.transceiver_voltage > 0.0) {
            return Err(Error::invalid("transceiver_voltage", "must be positive"));
        }
        self.dlc.validate()?;
        if let SourcePolicy::Fixed(profile) = &self.source {
            profile.validate()?;
        }
        self.battery.validate()?;
        if !(self.charge_current >= 0.0) {
            return Err(Error::invalid("charge_current", "must be ≥ 0"));
        }
        let cap = charge_current_cap(&self.battery);
        if self.charge_current > cap * (1.0 + 1e-12) {
            return Err(Error::ChargeCapExceeded {
                current: self.charge_current,
                cap,
            });
        }
        for (name, soc) in [
            ("motion_initial_soc", self.motion_initial_soc),
            ("charging_initial_soc", self.charging_initial_soc),
        ] {
            if !(soc > 0.0 && soc <= 1.0) {
                return Err(Error::invalid(name, "must lie in (0, 1]"));
            }
        }
        Ok(())
    }
}

impl TryFrom<ConfigFile> for MissionConfig {
    type Error = Error;

    fn try_from(f: ConfigFile) -> Result<Self> {
        let a = &f.airframe;
        let m = &f.motor;
        let d = &f.dlc;
        let b = &f.battery;
        let source = match &d.source_power_w {
            SourcePowerField::Named(s) if s == "max-allowed" => SourcePolicy::MaxAllowed,
            SourcePowerField::Named(s) => {
                return Err(Error::Config(format!(
                    "source_power_w: expected watts, a profile or \"max-allowed\", got `{s}`"
                )))
            }
            SourcePowerField::Power(p) => SourcePolicy::Fixed(p.clone()),
        };
        let node_powers = f
            .comm
            .nodes
            .iter()
            .flat_map(|n| std::iter::repeat_n(n.power_w.clone(), n.count))
            .collect();
        let cfg = MissionConfig {
            start: f.mission.start_m,
            destination: f.mission.destination_m,
            external_force: f.mission.external_force_n,
            hover_duration: f.mission.hover_duration_s,
            stage2_mode: f.mission.stage2_mode,
            dt: f.integration.dt_s,
            airframe: AirframeParams {
                lift_coeff: a.lift_coeff_n_s2_per_rad2,
                arm_length: a.arm_length_m,
                inertia_x: a.inertia_x_kg_m2,
                inertia_y: a.inertia_y_kg_m2,
                mass: a.mass_kg,
                v_max: a.v_max_rad_per_s,
            },
            motor: MotorParams::from_kv(
                m.resistance_ohm,
                m.kv_rpm_per_v,
                m.friction_torque_n_m,
                m.drag_coeff_n_m_s2_per_rad2,
                m.damping_n_m_s_per_rad,
                m.rotor_inertia_kg_m2,
            ),
            comm: CommSchedule {
                node_powers,
                t0: f.comm.start_s,
                tf: f.comm.end_s.unwrap_or(f.mission.hover_duration_s),
            },
            transceiver_voltage: f.comm.transceiver_voltage_v,
            wpt_enabled: d.enabled,
            dlc: DlcParams {
                a1: d.a1,
                a2: d.a2,
                b1: d.b1_w,
                b2: d.b2_w,
                sigma: d.sigma,
                chi: d.chi_m,
                visibility: d.visibility_m,
                wavelength: d.wavelength_m,
                size_distribution: d.size_distribution,
                source_position: d.source_position_m,
            },
            source,
            battery: BatteryParams::with_flow_rate_per_min(
                b.capacity_a_s,
                b.split,
                b.flow_rate_per_min,
                b.nominal_voltage_v,
                b.c_rating_per_h,
            ),
            charge_current: b.charge_current_a,
            motion_initial_soc: b.motion_initial_soc,
            charging_initial_soc: b.charging_initial_soc,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
