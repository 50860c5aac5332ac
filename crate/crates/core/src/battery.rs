//! Kinetic battery model: an available-charge well `y1` feeding the load and
//! a bound-charge well `y2` that diffuses into it at a rate set by `k_F`.
//!
//! Signed current `ī` is positive while charging and negative while
//! discharging. All times are seconds and charges ampere-seconds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::powertrain::{motor_current, MotorParams};

/// Relative slack on the well upper bounds.
pub const WELL_TOLERANCE: f64 = 1e-9;
/// Resolution of event-time bisection, s.
pub const EVENT_RESOLUTION: f64 = 1e-6;
/// Slack used to decide that a well has reached its upper bound.
const FULL_TRIGGER: f64 = 1e-12;

/// LiPo pack parameters in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryParams {
    /// Capacity B, A·s.
    pub capacity: f64,
    /// Fraction ω of the capacity held by the available well.
    pub split: f64,
    /// Well-to-well flow rate k_F, 1/s.
    pub flow_rate: f64,
    /// Nominal voltage, V.
    pub nominal_voltage: f64,
    /// C-rating, 1/h.
    pub c_rating: f64,
}

impl BatteryParams {
    /// Builds parameters from a flow rate quoted per minute.
    pub fn with_flow_rate_per_min(
        capacity: f64,
        split: f64,
        flow_rate_per_min: f64,
        nominal_voltage: f64,
        c_rating: f64,
    ) -> Self {
        Self {
            capacity,
            split,
            flow_rate: flow_rate_per_min / 60.0,
            nominal_voltage,
            c_rating,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.capacity > 0.0 && self.capacity.is_finite()) {
            return Err(Error::invalid("capacity", "must be positive"));
        }
        if !(self.split > 0.0 && self.split < 1.0) {
            return Err(Error::invalid("split", format!("must lie in (0, 1), got {}", self.split)));
        }
        if !(self.flow_rate > 0.0 && self.flow_rate.is_finite()) {
            return Err(Error::invalid("flow_rate", "must be positive"));
        }
        if !(self.nominal_voltage > 0.0) {
            return Err(Error::invalid("nominal_voltage", "must be positive"));
        }
        if !(self.c_rating > 0.0) {
            return Err(Error::invalid("c_rating", "must be positive"));
        }
        Ok(())
    }

    /// k′ = k_F / (ω(1 − ω)).
    pub fn k_prime(&self) -> f64 {
        self.flow_rate / (self.split * (1.0 - self.split))
    }

    pub fn available_max(&self) -> f64 {
        self.split * self.capacity
    }

    pub fn bound_max(&self) -> f64 {
        (1.0 - self.split) * self.capacity
    }
}

/// Largest recommended charge current, `c_rating × B` with B in A·h.
pub fn charge_current_cap(p: &BatteryParams) -> f64 {
    p.c_rating * p.capacity / 3600.0
}

/// Charge in the two wells at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KibamState {
    pub y1: f64,
    pub y2: f64,
    pub t: f64,
}

impl KibamState {
    /// A full pack at `t = 0`.
    pub fn full(p: &BatteryParams) -> Self {
        Self::at_soc(p, 1.0)
    }

    /// Both wells at equal height holding `soc × B` in total.
    pub fn at_soc(p: &BatteryParams, soc: f64) -> Self {
        Self {
            y1: soc * p.available_max(),
            y2: soc * p.bound_max(),
            t: 0.0,
        }
    }

    pub fn total(&self) -> f64 {
        self.y1 + self.y2
    }

    /// Well heights `(h1, h2)`.
    pub fn heights(&self, p: &BatteryParams) -> (f64, f64) {
        (self.y1 / p.split, self.y2 / (1.0 - p.split))
    }

    pub fn within_bounds(&self, p: &BatteryParams) -> bool {
        self.y1 >= 0.0
            && self.y2 >= 0.0
            && self.y1 <= p.available_max() * (1.0 + WELL_TOLERANCE)
            && self.y2 <= p.bound_max() * (1.0 + WELL_TOLERANCE)
    }

    fn clamped(mut self, p: &BatteryParams) -> Self {
        self.y1 = self.y1.clamp(0.0, p.available_max() * (1.0 + WELL_TOLERANCE));
        self.y2 = self.y2.clamp(0.0, p.bound_max() * (1.0 + WELL_TOLERANCE));
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatteryEvent {
    /// The available well ran dry.
    Empty,
    /// The available well reached ωB while charging.
    AvailableFull,
    /// The bound well reached (1 − ω)B.
    BoundFull,
}

/// Result of advancing a state. When an event fires the state stops at
/// the event time, so `state.t` may be earlier than requested.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub state: KibamState,
    pub event: Option<BatteryEvent>,
}

/// `(1 − e^{−x}) / x`
fn phi1(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        1.0 - x / 2.0 + x * x / 6.0 - x.powi(3) / 24.0 + x.powi(4) / 120.0
    } else {
        -(-x).exp_m1() / x
    }
}

/// `(x − 1 + e^{−x}) / x`
fn phi2(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        x / 2.0 - x * x / 6.0 + x.powi(3) / 24.0 - x.powi(4) / 120.0
    } else {
        1.0 - phi1(x)
    }
}

/// Closed-form well levels after `delta` seconds of constant current,
/// without bounds or events.
pub fn closed_form_levels(s: &KibamState, current: f64, delta: f64, p: &BatteryParams) -> (f64, f64) {
    let w = p.split;
    let x = p.k_prime() * delta;
    let decay = (-x).exp();
    let relax = -(-x).exp_m1();
    let y0 = s.y1 + s.y2;
    let ramp = current * delta * phi2(x);
    let y1 = s.y1 * decay + y0 * w * relax + current * delta * phi1(x) + w * ramp;
    let y2 = s.y2 * decay + y0 * (1.0 - w) * relax + (1.0 - w) * ramp;
    (y1, y2)
}

/// Constraint margins; all must stay ≥ 0.
fn margins(y1: f64, y2: f64, p: &BatteryParams) -> [(BatteryEvent, f64); 3] {
    [
        (BatteryEvent::Empty, y1),
        (BatteryEvent::AvailableFull, p.available_max() * (1.0 + FULL_TRIGGER) - y1),
        (BatteryEvent::BoundFull, p.bound_max() * (1.0 + FULL_TRIGGER) - y2),
    ]
}

fn first_violation(y1: f64, y2: f64, p: &BatteryParams) -> Option<BatteryEvent> {
    margins(y1, y2, p)
        .into_iter()
        .find(|&(_, m)| m < 0.0)
        .map(|(e, _)| e)
}

/// Shrinks `[lo, hi]` around the first violation; `lo` stays feasible.
fn bisect(levels: impl Fn(f64) -> (f64, f64), mut lo: f64, mut hi: f64, p: &BatteryParams) -> f64 {
    while hi - lo > EVENT_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        let (y1, y2) = levels(mid);
        if first_violation(y1, y2, p).is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// Time at which a well level `α + β e^{−k′t} + γ t` turns around.
fn turning_point(level0: f64, asymptote: f64, slope: f64, k: f64) -> Option<f64> {
    let beta = level0 - asymptote;
    let r = k * beta / slope;
    (k > 0.0 && r > 0.0 && r.is_finite()).then(|| r.ln() / k).filter(|t| *t > 0.0)
}

/// Advances the state by `delta` seconds of constant current using the
/// closed-form solution, stopping at the first empty/full event.
pub fn step_closed_form(
    s: &KibamState,
    current: f64,
    delta: f64,
    p: &BatteryParams,
) -> Result<StepOutcome> {
    if !(delta >= 0.0) {
        return Err(Error::invalid("delta", "step length must be ≥ 0"));
    }
    let levels = |t: f64| closed_form_levels(s, current, t, p);
    let w = p.split;
    let k = p.k_prime();
    let y0 = s.total();

    // Each level is monotone between its turning points, so bisection on
    // every piece in order finds the first crossing.
    let mut splits = vec![0.0, delta];
    if k > 0.0 && current != 0.0 {
        let a1 = y0 * w + current * (1.0 - w) / k;
        let a2 = y0 * (1.0 - w) - current * (1.0 - w) / k;
        splits.extend(turning_point(s.y1, a1, current * w, k));
        splits.extend(turning_point(s.y2, a2, current * (1.0 - w), k));
    }
    splits.retain(|t| *t >= 0.0 && *t <= delta);
    splits.sort_by(f64::total_cmp);

    if let Some(event) = first_violation(s.y1, s.y2, p) {
        return Ok(StepOutcome {
            state: s.clamped(p),
            event: Some(event),
        });
    }
    for piece in splits.windows(2) {
        let (a, b) = (piece[0], piece[1]);
        let (y1, y2) = levels(b);
        if let Some(event) = first_violation(y1, y2, p) {
            let t_event = bisect(levels, a, b, p);
            let (y1, y2) = levels(t_event);
            return Ok(StepOutcome {
                state: KibamState { y1, y2, t: s.t + t_event }.clamped(p),
                event: Some(event),
            });
        }
    }
    let (y1, y2) = levels(delta);
    Ok(StepOutcome {
        state: KibamState { y1, y2, t: s.t + delta }.clamped(p),
        event: None,
    })
}

fn derivative(y1: f64, y2: f64, current: f64, p: &BatteryParams) -> (f64, f64) {
    let flow = p.flow_rate * (y2 / (1.0 - p.split) - y1 / p.split);
    (current + flow, -flow)
}

fn rk4(
    y1: f64,
    y2: f64,
    t: f64,
    h: f64,
    current: &impl Fn(f64) -> f64,
    p: &BatteryParams,
) -> (f64, f64) {
    let (k1a, k1b) = derivative(y1, y2, current(t), p);
    let (k2a, k2b) = derivative(y1 + 0.5 * h * k1a, y2 + 0.5 * h * k1b, current(t + 0.5 * h), p);
    let (k3a, k3b) = derivative(y1 + 0.5 * h * k2a, y2 + 0.5 * h * k2b, current(t + 0.5 * h), p);
    let (k4a, k4b) = derivative(y1 + h * k3a, y2 + h * k3b, current(t + h), p);
    (
        y1 + h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a),
        y2 + h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b),
    )
}

/// Integrates the two-well equations with fixed-step RK4 for `delta`
/// seconds. `current` is evaluated at times relative to the step start.
pub fn step_ode(
    s: &KibamState,
    current: impl Fn(f64) -> f64,
    delta: f64,
    p: &BatteryParams,
    dt: f64,
) -> Result<StepOutcome> {
    if !(dt > 0.0) {
        return Err(Error::invalid("dt", "integration step must be positive"));
    }
    if !(delta >= 0.0) {
        return Err(Error::invalid("delta", "step length must be ≥ 0"));
    }
    if let Some(event) = first_violation(s.y1, s.y2, p) {
        return Ok(StepOutcome {
            state: s.clamped(p),
            event: Some(event),
        });
    }
    let n = (delta / dt).ceil() as usize;
    let (mut y1, mut y2) = (s.y1, s.y2);
    let mut t = 0.0;
    for k in 1..=n {
        let t_next = if k == n { delta } else { k as f64 * dt };
        let h = t_next - t;
        let (n1, n2) = rk4(y1, y2, t, h, &current, p);
        if let Some(event) = first_violation(n1, n2, p) {
            let (b1, b2, t0) = (y1, y2, t);
            let sub = |tau: f64| rk4(b1, b2, t0, tau, &current, p);
            let tau = bisect(sub, 0.0, h, p);
            let (e1, e2) = sub(tau);
            return Ok(StepOutcome {
                state: KibamState { y1: e1, y2: e2, t: s.t + t0 + tau }.clamped(p),
                event: Some(event),
            });
        }
        y1 = n1;
        y2 = n2;
        t = t_next;
    }
    Ok(StepOutcome {
        state: KibamState { y1, y2, t: s.t + delta }.clamped(p),
        event: None,
    })
}

/// Discharge current: the four motor currents plus `P_comm / e_tr`.
pub fn discharge_current(
    velocities: [f64; 4],
    accelerations: [f64; 4],
    motor: &MotorParams,
    p_comm: f64,
    e_tr: f64,
) -> f64 {
    let control: f64 = velocities
        .iter()
        .zip(accelerations)
        .map(|(&v, a)| motor_current(v, a, motor))
        .sum();
    control + p_comm / e_tr
}

/// Piecewise-constant signed current.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LoadProfile {
    /// `(duration s, current A)` pairs.
    pub segments: Vec<(f64, f64)>,
}

impl LoadProfile {
    /// Rejects negative durations and charge segments above the C-rating cap.
    pub fn validate(&self, p: &BatteryParams) -> Result<()> {
        let cap = charge_current_cap(p);
        for &(duration, current) in &self.segments {
            if !(duration >= 0.0) {
                return Err(Error::invalid("load duration", "must be ≥ 0"));
            }
            if current > cap * (1.0 + 1e-12) {
                return Err(Error::ChargeCapExceeded { current, cap });
            }
        }
        Ok(())
    }
}

/// One sample of a battery trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub t: f64,
    pub y1: f64,
    pub y2: f64,
    /// Signed current applied on the interval ending at `t`.
    pub current: f64,
}

/// Consumed/harvested ratio `1 − y(t_f)/y(t₀)`.
pub fn gamma(initial: &KibamState, end: &KibamState) -> f64 {
    1.0 - end.total() / initial.total()
}

/// Loads for one mission phase, as piecewise-constant segments of
/// `(duration, discharge current on the motion battery, charge current on
/// the charging battery)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MissionPhase {
    pub name: &'static str,
    pub segments: Vec<PhaseSegment>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSegment {
    pub duration: f64,
    pub discharge: f64,
    pub charge: f64,
}

/// Per-phase share of each battery's initial charge that was consumed
/// (negative when charge was gained).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseRatio {
    pub phase: &'static str,
    pub motion_battery: f64,
    pub charging_battery: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualRun {
    pub motion_trace: Vec<TracePoint>,
    pub charging_trace: Vec<TracePoint>,
    /// γ of the motion and charging batteries over the whole mission.
    pub gamma: [f64; 2],
    pub phase_ratios: Vec<PhaseRatio>,
    /// Charge gained by the charging battery as a fraction of its capacity.
    pub charge_gain: f64,
    /// Time the charging battery saturated, if it did.
    pub charging_full_at: Option<f64>,
}

/// Runs two packs through the mission: the motion battery carries every
/// discharge current, the charging battery receives the laser charge
/// current.
pub fn dual_battery_run(
    phases: &[MissionPhase],
    motion: (&BatteryParams, KibamState),
    charging: (&BatteryParams, KibamState),
) -> Result<DualRun> {
    let (p1, s1_init) = motion;
    let (p2, s2_init) = charging;
    p1.validate()?;
    p2.validate()?;
    let charge_profile = LoadProfile {
        segments: phases
            .iter()
            .flat_map(|ph| ph.segments.iter().map(|s| (s.duration, s.charge)))
            .collect(),
    };
    charge_profile.validate(p2)?;

    let mut s1 = s1_init;
    let mut s2 = s2_init;
    let mut motion_trace = vec![TracePoint { t: s1.t, y1: s1.y1, y2: s1.y2, current: 0.0 }];
    let mut charging_trace = vec![TracePoint { t: s2.t, y1: s2.y1, y2: s2.y2, current: 0.0 }];
    let mut phase_ratios = Vec::with_capacity(phases.len());
    let mut charging_full_at = None;

    for phase in phases {
        let (start1, start2) = (s1.total(), s2.total());
        for seg in &phase.segments {
            let out = step_closed_form(&s1, -seg.discharge, seg.duration, p1)?;
            if out.event == Some(BatteryEvent::Empty) {
                return Err(Error::BatteryEmpty {
                    battery: 1,
                    phase: phase.name,
                    time: out.state.t,
                });
            }
            s1 = out.state;
            motion_trace.push(TracePoint { t: s1.t, y1: s1.y1, y2: s1.y2, current: -seg.discharge });

            let target = s2.t + seg.duration;
            let mut current = if charging_full_at.is_some() { 0.0 } else { seg.charge };
            loop {
                let out = step_closed_form(&s2, current, target - s2.t, p2)?;
                s2 = out.state;
                match out.event {
                    Some(BatteryEvent::Empty) => {
                        return Err(Error::BatteryEmpty {
                            battery: 2,
                            phase: phase.name,
                            time: s2.t,
                        })
                    }
                    Some(_) if current > 0.0 => {
                        charging_full_at.get_or_insert(s2.t);
                        current = 0.0;
                    }
                    Some(_) => {
                        return Err(Error::Numerical(
                            "charging battery over-full while resting".into(),
                        ))
                    }
                    None => break,
                }
            }
            s2.t = target;
            charging_trace.push(TracePoint { t: s2.t, y1: s2.y1, y2: s2.y2, current });
        }
        phase_ratios.push(PhaseRatio {
            phase: phase.name,
            motion_battery: (start1 - s1.total()) / s1_init.total(),
            charging_battery: (start2 - s2.total()) / s2_init.total(),
        });
    }

    Ok(DualRun {
        gamma: [gamma(&s1_init, &s1), gamma(&s2_init, &s2)],
        charge_gain: (s2.total() - s2_init.total()) / p2.capacity,
        motion_trace,
        charging_trace,
        phase_ratios,
        charging_full_at,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::powertrain::tests::table1_motor;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    pub(crate) fn table1_battery() -> BatteryParams {
        BatteryParams::with_flow_rate_per_min(36_000.0, 0.8, 4.5e-5, 11.1, 1.0)
    }

    /// Independent RK4 on the raw equations, no events, no clamping.
    fn rk4_oracle(s: &KibamState, current: f64, delta: f64, p: &BatteryParams, dt: f64) -> (f64, f64) {
        let f = |y1: f64, y2: f64| {
            let h1 = y1 / p.split;
            let h2 = y2 / (1.0 - p.split);
            (current + p.flow_rate * (h2 - h1), -p.flow_rate * (h2 - h1))
        };
        let n = (delta / dt).round() as usize;
        let h = delta / n as f64;
        let (mut a, mut b) = (s.y1, s.y2);
        for _ in 0..n {
            let (k1a, k1b) = f(a, b);
            let (k2a, k2b) = f(a + 0.5 * h * k1a, b + 0.5 * h * k1b);
            let (k3a, k3b) = f(a + 0.5 * h * k2a, b + 0.5 * h * k2b);
            let (k4a, k4b) = f(a + h * k3a, b + h * k3b);
            a += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
            b += h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
        }
        (a, b)
    }

    #[test]
    fn flow_rate_unit_conversion() {
        assert_relative_eq!(table1_battery().flow_rate, 7.5e-7, max_relative = 1e-15);
    }

    #[test]
    fn equal_heights_at_rest_stay_put() {
        let p = table1_battery();
        let s = KibamState::full(&p);
        for delta in [0.0, 1.0, 3600.0, 1e6] {
            let out = step_closed_form(&s, 0.0, delta, &p).unwrap();
            assert_eq!(out.event, None);
            assert_relative_eq!(out.state.y1, s.y1, max_relative = 1e-14);
            assert_relative_eq!(out.state.y2, s.y2, max_relative = 1e-14);
        }
    }

    #[test]
    fn hover_discharge_matches_rk4() {
        let p = table1_battery();
        let s = KibamState::full(&p);
        let out = step_closed_form(&s, -102.0, 20.0, &p).unwrap();
        let (y1, y2) = rk4_oracle(&s, -102.0, 20.0, &p, 0.01);
        assert_relative_eq!(out.state.y1, y1, max_relative = 1e-6);
        assert_relative_eq!(out.state.y2, y2, max_relative = 1e-6);
        assert_relative_eq!(out.state.total(), s.total() - 2040.0, max_relative = 1e-12);
    }

    #[test]
    fn ode_matches_closed_form() {
        let p = table1_battery();
        let s = KibamState::at_soc(&p, 0.7);
        for current in [-150.0, -10.0, 0.0, 5.0] {
            let a = step_closed_form(&s, current, 60.0, &p).unwrap().state;
            let b = step_ode(&s, |_| current, 60.0, &p, 0.01).unwrap().state;
            assert_relative_eq!(a.y1, b.y1, max_relative = 1e-6);
            assert_relative_eq!(a.y2, b.y2, max_relative = 1e-6);
        }
    }

    #[test]
    fn decoupled_wells_without_flow() {
        let mut p = table1_battery();
        p.flow_rate = 0.0;
        let s = KibamState::at_soc(&p, 0.5);
        let a = step_ode(&s, |_| -3.0, 100.0, &p, 0.01).unwrap().state;
        assert_eq!(a.y2, s.y2);
        assert_relative_eq!(a.y1, s.y1 - 300.0, max_relative = 1e-12);
        let (y1, y2) = closed_form_levels(&s, -3.0, 100.0, &p);
        assert_eq!(y2, s.y2);
        assert_relative_eq!(y1, s.y1 - 300.0, max_relative = 1e-12);
    }

    #[test]
    fn recovery_during_rest() {
        let p = table1_battery();
        let s = KibamState::full(&p);
        let pulsed = step_closed_form(&s, -200.0, 100.0, &p).unwrap().state;
        let mut prev = pulsed.y1;
        let mut state = pulsed;
        for _ in 0..10 {
            state = step_ode(&state, |_| 0.0, 60.0, &p, 0.01).unwrap().state;
            assert!(state.y1 > prev);
            assert_relative_eq!(state.total(), pulsed.total(), max_relative = 1e-12);
            prev = state.y1;
        }
    }

    #[test]
    fn rest_after_pulse_recovers_available_charge() {
        let p = table1_battery();
        let s = KibamState::full(&p);
        let pulse_then_rest = step_closed_form(&s, -150.0, 60.0, &p).unwrap().state;
        let pulse_then_rest = step_closed_form(&pulse_then_rest, 0.0, 600.0, &p).unwrap().state;
        let rest_then_pulse = step_closed_form(&s, 0.0, 600.0, &p).unwrap().state;
        let rest_then_pulse = step_closed_form(&rest_then_pulse, -150.0, 60.0, &p).unwrap().state;
        assert_eq!(pulse_then_rest.t, rest_then_pulse.t);
        assert!(pulse_then_rest.y1 > rest_then_pulse.y1);
    }

    #[test]
    fn empty_event_located() {
        let p = table1_battery();
        let s = KibamState::full(&p);
        let out = step_closed_form(&s, -200.0, 3600.0, &p).unwrap();
        assert_eq!(out.event, Some(BatteryEvent::Empty));
        assert!(out.state.y1 >= 0.0 && out.state.y1 < 200.0 * 2.0 * EVENT_RESOLUTION);
        // crossing is slightly after y1/|ī| since the bound well feeds the load
        assert!(out.state.t > s.y1 / 200.0);
        let ode = step_ode(&s, |_| -200.0, 3600.0, &p, 0.01).unwrap();
        assert_eq!(ode.event, Some(BatteryEvent::Empty));
        assert_abs_diff_eq!(ode.state.t, out.state.t, epsilon = 1e-5);
    }

    #[test]
    fn full_event_when_charging_full_pack() {
        let p = table1_battery();
        let s = KibamState::full(&p);
        let out = step_closed_form(&s, 10.0, 20.0, &p).unwrap();
        assert_eq!(out.event, Some(BatteryEvent::AvailableFull));
        assert!(out.state.t < 1e-5);
        assert!(out.state.within_bounds(&p));
    }

    #[test]
    fn charge_cap() {
        let p = BatteryParams::with_flow_rate_per_min(36_000.0, 0.8, 4.5e-5, 11.1, 1.0);
        assert_relative_eq!(charge_current_cap(&p), 10.0, max_relative = 1e-15);
        let two_c = BatteryParams { c_rating: 2.0, ..p };
        assert_relative_eq!(charge_current_cap(&two_c), 20.0, max_relative = 1e-15);
        let bad = LoadProfile { segments: vec![(10.0, -50.0), (5.0, 12.0)] };
        assert!(matches!(bad.validate(&p), Err(Error::ChargeCapExceeded { .. })));
        let ok = LoadProfile { segments: vec![(10.0, -50.0), (5.0, 10.0)] };
        assert!(ok.validate(&p).is_ok());
    }

    #[test]
    fn discharge_current_examples() {
        let m = table1_motor();
        let vh = 956.29;
        assert_abs_diff_eq!(
            discharge_current([vh; 4], [0.0; 4], &m, 5.0, 1.0),
            4.0 * 24.263_816_053_596_76 + 5.0,
            epsilon = 1e-9
        );
        assert_relative_eq!(
            discharge_current([0.0; 4], [0.0; 4], &m, 0.0, 1.0),
            4.0 * m.friction_torque / m.torque_const,
            max_relative = 1e-15
        );
        // communication alone, motors excluded
        let floor = discharge_current([0.0; 4], [0.0; 4], &m, 0.0, 1.0);
        assert_abs_diff_eq!(discharge_current([0.0; 4], [0.0; 4], &m, 5.0, 1.0) - floor, 5.0, epsilon = 1e-12);
    }

    #[test]
    fn dual_run_idle_is_neutral() {
        let p = table1_battery();
        let phases = [MissionPhase {
            name: "idle",
            segments: vec![PhaseSegment { duration: 100.0, discharge: 0.0, charge: 0.0 }],
        }];
        let run = dual_battery_run(&phases, (&p, KibamState::full(&p)), (&p, KibamState::full(&p))).unwrap();
        assert_eq!(run.gamma, [0.0, 0.0]);
        assert_eq!(run.charge_gain, 0.0);
    }

    #[test]
    fn dual_run_reports_empty_battery() {
        let p = BatteryParams { capacity: 1000.0, ..table1_battery() };
        let phases = [MissionPhase {
            name: "travel",
            segments: vec![PhaseSegment { duration: 100.0, discharge: 100.0, charge: 0.0 }],
        }];
        let err = dual_battery_run(&phases, (&p, KibamState::full(&p)), (&p, KibamState::full(&p))).unwrap_err();
        match err {
            Error::BatteryEmpty { battery, phase, time } => {
                assert_eq!((battery, phase), (1, "travel"));
                assert!(time > 7.9 && time < 10.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dual_run_saturates_charging_battery() {
        let p = table1_battery();
        let phases = [MissionPhase {
            name: "hover",
            segments: vec![PhaseSegment { duration: 20.0, discharge: 1.0, charge: 10.0 }],
        }];
        let run = dual_battery_run(&phases, (&p, KibamState::full(&p)), (&p, KibamState::at_soc(&p, 0.9999))).unwrap();
        assert!(run.charging_full_at.is_some());
        assert!(run.charge_gain < 200.0 / p.capacity);
        assert!(run.charging_trace.last().unwrap().t == 20.0);
    }

    fn random_state() -> impl Strategy<Value = KibamState> {
        (0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(a, b)| {
            let p = table1_battery();
            KibamState { y1: a * p.available_max(), y2: b * p.bound_max(), t: 0.0 }
        })
    }

    proptest! {
        #[test]
        fn conservation(s in random_state(), current in -200.0..200.0f64, delta in 0.0..3600.0f64) {
            let p = table1_battery();
            let out = step_closed_form(&s, current, delta, &p).unwrap();
            let elapsed = out.state.t - s.t;
            let scale = (current * elapsed).abs().max(s.total()).max(1.0);
            prop_assert!((out.state.total() - s.total() - current * elapsed).abs() <= 1e-9 * scale);
            prop_assert!(out.state.within_bounds(&p));
        }

        #[test]
        fn rest_converges_to_equal_heights(s in random_state()) {
            let p = table1_battery();
            let gap = |st: &KibamState| { let (h1, h2) = st.heights(&p); (h1 - h2).abs() };
            let mut prev = gap(&s);
            let mut st = s;
            for _ in 0..5 {
                st = step_closed_form(&st, 0.0, 1e5, &p).unwrap().state;
                let g = gap(&st);
                prop_assert!(g <= prev * (1.0 + 1e-12) + 1e-9);
                prev = g;
            }
        }
    }
}
