//! A single mission: travel to the destination, then hover while
//! communicating and receiving laser charge.

use serde::Serialize;

use super::config::MissionConfig;
use crate::battery::{dual_battery_run, discharge_current, DualRun, KibamState, MissionPhase, PhaseSegment};
use crate::energy::{comm_energy, hover_energy, travel_energy, EnergyReport, GRAVITY};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::maneuver::{build_plan, hover_velocity, AirframeParams, ManeuverPlan, StageTwoFormula};
use crate::powertrain::{energy_constants, motor_current};
use crate::profile::trapezoid;
use crate::wpt::{charge_power_cap, harvested_power, transmission_efficiency, SourcePolicy};

/// Laser link at a fixed UAV position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WptSummary {
    pub enabled: bool,
    pub distance: f64,
    pub nu: f64,
    /// Source power at the start of the window, W.
    pub p_source: f64,
    /// Harvested power at the start of the window, W.
    pub p_harvested: f64,
    pub e_harvested: f64,
    /// `P₀ / P_s`; NaN when the source is off.
    pub zeta: f64,
    /// Current delivered to the charging battery at the start of the window, A.
    pub charge_current: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MissionRun {
    pub displacement: Vec3,
    pub hover_velocity: f64,
    /// `None` when start and destination coincide.
    pub plan: Option<ManeuverPlan>,
    pub energy: EnergyReport,
    pub wpt: WptSummary,
    pub battery: DualRun,
}

/// Travel time and energy for `displacement` with the rotor limit `v_max`.
pub fn travel_point(
    displacement: Vec3,
    f_ext: Vec3,
    airframe: &AirframeParams,
    cfg: &MissionConfig,
    mode: StageTwoFormula,
) -> Result<(ManeuverPlan, f64, [f64; 5])> {
    let plan = build_plan(displacement, f_ext, airframe, mode)?;
    let (e, per_stage) = travel_energy(&plan, &energy_constants(&cfg.motor));
    Ok((plan, e, per_stage))
}

/// Force of gravity alone on the airframe, N.
pub fn weight(airframe: &AirframeParams) -> Vec3 {
    Vec3::new(0.0, 0.0, -airframe.mass * GRAVITY)
}

/// Source power, harvested power and charge current at time `t` of the
/// hover window.
fn link_at(cfg: &MissionConfig, policy: &SourcePolicy, t: f64, nu: f64) -> Result<(f64, f64, f64)> {
    if !cfg.wpt_enabled {
        return Ok((0.0, 0.0, 0.0));
    }
    let e_nom = cfg.battery.nominal_voltage;
    let p_ch = charge_power_cap(cfg.charge_current, e_nom);
    let p_s = policy.power(t, nu, p_ch, &cfg.dlc)?;
    let p0 = harvested_power(p_s, nu, &cfg.dlc);
    Ok((p_s, p0, (p0 / e_nom).min(cfg.charge_current)))
}

/// Laser link for a UAV held at `pos` for the hover duration.
pub fn harvest_point(cfg: &MissionConfig, policy: &SourcePolicy, pos: Vec3) -> Result<WptSummary> {
    let nu = transmission_efficiency(pos, &cfg.dlc);
    let (p_source, p_harvested, charge_current) = link_at(cfg, policy, 0.0, nu)?;
    let e_harvested = match policy {
        _ if !cfg.wpt_enabled => 0.0,
        SourcePolicy::Fixed(profile) if !profile.is_constant() => trapezoid(
            |t| harvested_power(profile.at(t), nu, &cfg.dlc),
            0.0,
            cfg.hover_duration,
            cfg.dt,
        ),
        _ => p_harvested * cfg.hover_duration,
    };
    Ok(WptSummary {
        enabled: cfg.wpt_enabled,
        distance: pos.distance(cfg.dlc.source_position),
        nu,
        p_source,
        p_harvested,
        e_harvested,
        zeta: if p_source > 0.0 { p_harvested / p_source } else { f64::NAN },
        charge_current,
    })
}

/// Piecewise-constant hover loads: motor current at `v_h` plus the comm
/// draw on the motion battery, laser charge on the charging battery.
fn hover_segments(cfg: &MissionConfig, v_hover: f64, nu: f64) -> Result<Vec<PhaseSegment>> {
    let duration = cfg.hover_duration;
    let comm = &cfg.comm;
    let smooth = comm.node_powers.iter().all(|p| p.is_constant())
        && match &cfg.source {
            SourcePolicy::Fixed(p) => p.is_constant() || !cfg.wpt_enabled,
            SourcePolicy::MaxAllowed => true,
        };
    let mut cuts = vec![0.0, comm.t0, comm.tf, duration];
    if !smooth {
        let n = (duration / cfg.dt).ceil() as usize;
        cuts.extend((1..n).map(|k| k as f64 * cfg.dt));
    }
    cuts.retain(|&t| (0.0..=duration).contains(&t));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let rotors = 4.0 * motor_current(v_hover, 0.0, &cfg.motor);
    let mut segments = Vec::with_capacity(cuts.len());
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        let (_, _, charge) = link_at(cfg, &cfg.source, mid, nu)?;
        segments.push(PhaseSegment {
            duration: b - a,
            discharge: rotors + comm.total_power(mid) / cfg.transceiver_voltage,
            charge,
        });
    }
    Ok(segments)
}

/// Flies the configured mission and steps both batteries through it.
pub fn run_mission(cfg: &MissionConfig) -> Result<MissionRun> {
    cfg.validate()?;
    let displacement = cfg.destination - cfg.start;
    let f_ext = cfg.external_force;
    let c = energy_constants(&cfg.motor);

    let (plan, per_stage) = if displacement == Vec3::ZERO {
        (None, [0.0; 5])
    } else {
        let (plan, _, per_stage) = travel_point(displacement, f_ext, &cfg.airframe, cfg, cfg.stage2_mode)?;
        (Some(plan), per_stage)
    };
    let v_hover = hover_velocity(f_ext, cfg.airframe.lift_coeff);
    let e_hover = hover_energy(cfg.hover_duration, f_ext, &cfg.airframe, &c)?;
    let e_comm = comm_energy(&cfg.comm, cfg.dt);
    let wpt = harvest_point(cfg, &cfg.source, cfg.destination)?;
    let energy = EnergyReport::new(per_stage, e_hover, e_comm, wpt.e_harvested)?;

    let travel = MissionPhase {
        name: "travel",
        segments: plan
            .iter()
            .flat_map(|p| &p.segments)
            .map(|seg| PhaseSegment {
                duration: seg.duration(),
                discharge: discharge_current(seg.velocities, [0.0; 4], &cfg.motor, 0.0, cfg.transceiver_voltage),
                charge: 0.0,
            })
            .collect(),
    };
    let hover = MissionPhase {
        name: "hover",
        segments: hover_segments(cfg, v_hover, wpt.nu)?,
    };
    let b = &cfg.battery;
    let battery = dual_battery_run(
        &[travel, hover],
        (b, KibamState::at_soc(b, cfg.motion_initial_soc)),
        (b, KibamState::at_soc(b, cfg.charging_initial_soc)),
    )?;
    if battery.gamma.iter().any(|g| !g.is_finite()) {
        return Err(Error::Numerical("non-finite battery ratio".into()));
    }

    Ok(MissionRun {
        displacement,
        hover_velocity: v_hover,
        plan,
        energy,
        wpt,
        battery,
    })
}
