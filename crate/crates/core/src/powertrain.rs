//! DC-motor electrical model and the power polynomial it induces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// rad/s per rpm, inverted: κ_E = κ_T = 9.5493 / κ_V for κ_V in rpm/V.
pub const KV_CONVERSION: f64 = 9.5493;

/// Electrical and mechanical constants of one rotor motor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotorParams {
    /// Winding resistance R, Ω.
    pub resistance: f64,
    /// Velocity constant κ_V as rated, rpm/V.
    pub kv_rpm_per_volt: f64,
    /// Back-EMF constant κ_E, V·s/rad.
    pub voltage_const: f64,
    /// Torque constant κ_T, N·m/A.
    pub torque_const: f64,
    /// Friction torque T_f, N·m.
    pub friction_torque: f64,
    /// Aerodynamic drag coefficient κ₀, N·m/(rad/s)².
    pub drag_coeff: f64,
    /// Viscous damping D_f, N·m·s/rad.
    pub damping: f64,
    /// Rotor inertia J, kg·m².
    pub rotor_inertia: f64,
}

impl MotorParams {
    /// Builds the parameter set from a rated κ_V, deriving κ_E = κ_T.
    pub fn from_kv(
        resistance: f64,
        kv_rpm_per_volt: f64,
        friction_torque: f64,
        drag_coeff: f64,
        damping: f64,
        rotor_inertia: f64,
    ) -> Self {
        let k = KV_CONVERSION / kv_rpm_per_volt;
        Self {
            resistance,
            kv_rpm_per_volt,
            voltage_const: k,
            torque_const: k,
            friction_torque,
            drag_coeff,
            damping,
            rotor_inertia,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("resistance", self.resistance),
            ("kv_rpm_per_volt", self.kv_rpm_per_volt),
            ("voltage_const", self.voltage_const),
            ("torque_const", self.torque_const),
            ("friction_torque", self.friction_torque),
            ("drag_coeff", self.drag_coeff),
            ("damping", self.damping),
            ("rotor_inertia", self.rotor_inertia),
        ];
        for (name, value) in fields {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive, got {value}")));
            }
        }
        Ok(())
    }
}

/// Coefficients c₁…c₉ of per-motor power as a polynomial in velocity and
/// its derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotorEnergyConstants {
    pub c: [f64; 9],
}

impl MotorEnergyConstants {
    /// `c_i` with the usual 1-based index.
    pub fn get(&self, i: usize) -> f64 {
        self.c[i - 1]
    }

    /// Steady-state power `Σ_{i=0..4} c_{i+1} vⁱ`.
    pub fn steady_power(&self, v: f64) -> f64 {
        let c = &self.c;
        c[0] + v * (c[1] + v * (c[2] + v * (c[3] + v * c[4])))
    }
}

/// Armature current `(T_f + κ₀v² + D_f v + J dv/dt) / κ_T`.
pub fn motor_current(v: f64, dv_dt: f64, p: &MotorParams) -> f64 {
    (p.friction_torque + p.drag_coeff * v * v + p.damping * v + p.rotor_inertia * dv_dt)
        / p.torque_const
}

/// Terminal voltage `R i + κ_E v`.
pub fn motor_voltage(i: f64, v: f64, p: &MotorParams) -> f64 {
    p.resistance * i + p.voltage_const * v
}

pub fn energy_constants(p: &MotorParams) -> MotorEnergyConstants {
    let MotorParams {
        resistance: r,
        voltage_const: ke,
        torque_const: kt,
        friction_torque: tf,
        drag_coeff: k0,
        damping: df,
        rotor_inertia: j,
        ..
    } = *p;
    let c1 = r * tf * tf / (kt * kt);
    let c2 = tf / kt * (ke + 2.0 * r * df / kt);
    let c3 = df / kt * (r * df / kt + ke) + 2.0 * r * tf * k0 / (kt * kt);
    let c4 = k0 / tf * c2;
    let c5 = k0 * k0 / (tf * tf) * c1;
    let c6 = 2.0 * j / tf * c1;
    let c7 = j * j / (tf * tf) * c1;
    let c8 = j / tf * c2;
    let c9 = kt / tf * c6;
    MotorEnergyConstants {
        c: [c1, c2, c3, c4, c5, c6, c7, c8, c9],
    }
}

/// Per-motor electrical power at velocity `v` and acceleration `dv_dt`.
///
/// Negative values at strong deceleration are returned as computed. `c₉`
/// keeps its published form `(κ_T/T_f)c₆`; expanding `e·i` directly gives
/// `(κ₀/T_f)c₆` for the `v²·dv/dt` term instead. The two agree whenever
/// `dv/dt = 0`, which holds on every interval of a maneuver plan.
pub fn instantaneous_power(v: f64, dv_dt: f64, c: &MotorEnergyConstants) -> f64 {
    let k = &c.c;
    c.steady_power(v) + dv_dt * (k[5] + k[6] * dv_dt + k[7] * v + k[8] * v * v)
}
