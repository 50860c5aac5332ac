//! Destination attitude under an external force and the six-stage
//! bang-bang rotor schedule that carries the UAV to its destination.
//!
//! Rotor numbering: rotors 1 and 3 sit on the body x axis, rotors 2 and 4
//! on the body y axis. A thrust difference between rotors 2 and 4 rolls the
//! airframe (inertia `I_x`), between rotors 1 and 3 pitches it (`I_y`).

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{to_spherical, wrap_angle, Vec3};

/// Slack on `|Γ| ≤ 1` to absorb rounding.
pub const GAMMA_TOLERANCE: f64 = 1e-12;

/// Below this `sin(pitch)` the roll angle is taken as zero.
const PITCH_SINGULARITY: f64 = 1e-12;

/// Airframe constants of the quadrotor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AirframeParams {
    /// Lift coefficient ϱ, N/(rad/s)².
    pub lift_coeff: f64,
    /// Rotor-to-center distance d′, m.
    pub arm_length: f64,
    /// Moment of inertia about body x, kg·m².
    pub inertia_x: f64,
    /// Moment of inertia about body y, kg·m².
    pub inertia_y: f64,
    /// Mass, kg.
    pub mass: f64,
    /// Maximum rotor velocity, rad/s.
    pub v_max: f64,
}

impl AirframeParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("lift_coeff", self.lift_coeff),
            ("arm_length", self.arm_length),
            ("inertia_x", self.inertia_x),
            ("inertia_y", self.inertia_y),
            ("mass", self.mass),
            ("v_max", self.v_max),
        ];
        for (name, value) in fields {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive, got {value}")));
            }
        }
        Ok(())
    }
}

/// Magnitude of the maximum force the four rotors produce, `4 ϱ v_max²`.
pub fn max_thrust(p: &AirframeParams) -> f64 {
    4.0 * p.lift_coeff * p.v_max * p.v_max
}

/// Rotor velocity that balances `f_ext` with all four rotors equal.
pub fn hover_velocity(f_ext: Vec3, lift_coeff: f64) -> f64 {
    (f_ext.norm() / (4.0 * lift_coeff)).sqrt()
}

/// Destination attitude together with every intermediate of its derivation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttitudeSolution {
    pub roll: f64,
    pub pitch: f64,
    /// Always zero.
    pub yaw: f64,
    /// Net force towards the destination, N. Negative when the external
    /// force overwhelms the UAV along the destination direction.
    pub a_force: f64,
    pub gamma: f64,
    pub eta: f64,
    pub beta: f64,
    pub theta_dest: f64,
    pub phi_dest: f64,
    pub theta_ext: f64,
    pub phi_ext: f64,
}

/// Solves the flying attitude that points the net force `thrust + f_ext`
/// at `dest` (relative to the UAV), given the maximum thrust magnitude.
pub fn solve_attitude(dest: Vec3, f_ext: Vec3, max_force: f64) -> Result<AttitudeSolution> {
    if !(max_force > 0.0) {
        return Err(Error::invalid("max_force", "must be positive"));
    }
    let dest_dir = to_spherical(dest).map_err(|_| Error::DegenerateDirection("destination"))?;
    let f = max_force;
    let fe = f_ext.norm();

    let (theta_e, phi_e, eta) = if fe > 0.0 {
        let s = to_spherical(f_ext)?;
        let cos_eta = (f_ext.dot(dest) / (fe * dest.norm())).clamp(-1.0, 1.0);
        (s.polar, s.azimuth, cos_eta.acos())
    } else {
        (0.0, 0.0, 0.0)
    };

    let gamma = fe / f * eta.sin();
    if gamma.abs() > 1.0 + GAMMA_TOLERANCE {
        return Err(Error::InfeasibleForce { gamma });
    }
    let gamma_c = gamma.clamp(-1.0, 1.0);

    let a_sq = f * f + fe * fe + 2.0 * f * fe * (eta + gamma_c.asin()).cos();
    let mut a_force = a_sq.max(0.0).sqrt();
    // The printed magnitude drops the sign of the root; recover it from
    // the projection form A = √(F² − |F_e|² sin²η) + |F_e| cos η.
    let projected = (f * f - fe * fe * eta.sin().powi(2)).max(0.0).sqrt() + fe * eta.cos();
    if projected < 0.0 {
        a_force = -a_force;
    }

    let cos_pitch = (a_force * dest_dir.polar.cos() - fe * theta_e.cos()) / f;
    let pitch = cos_pitch.clamp(-1.0, 1.0).acos();

    let sin_pitch = pitch.sin();
    let (beta, roll) = if sin_pitch.abs() < PITCH_SINGULARITY {
        (dest_dir.azimuth, 0.0)
    } else {
        let arg = fe * theta_e.sin() * (dest_dir.azimuth - phi_e).sin() / (f * sin_pitch);
        let beta = wrap_angle(dest_dir.azimuth - arg.clamp(-1.0, 1.0).asin());
        (beta, (beta.tan() * sin_pitch).atan())
    };

    Ok(AttitudeSolution {
        roll,
        pitch,
        yaw: 0.0,
        a_force,
        gamma,
        eta,
        beta,
        theta_dest: dest_dir.polar,
        phi_dest: dest_dir.azimuth,
        theta_ext: theta_e,
        phi_ext: phi_e,
    })
}

/// True when the UAV can aim at `dest` and still push towards it.
pub fn balance_feasible(dest: Vec3, f_ext: Vec3, max_force: f64) -> bool {
    solve_attitude(dest, f_ext, max_force).is_ok_and(|a| a.a_force >= 0.0)
}

/// Duration formula for the two translation stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageTwoFormula {
    /// `√(2 d A / m)`, as printed in the source model.
    PaperLiteral,
    /// `√(2 d m / A)`, uniformly accelerated motion over `d`.
    #[default]
    Corrected,
}

impl fmt::Display for StageTwoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StageTwoFormula::PaperLiteral => "paper-literal",
            StageTwoFormula::Corrected => "corrected",
        })
    }
}

impl FromStr for StageTwoFormula {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-literal" => Ok(StageTwoFormula::PaperLiteral),
            "corrected" => Ok(StageTwoFormula::Corrected),
            other => Err(Error::Config(format!(
                "unknown stage-2 mode `{other}` (expected paper-literal or corrected)"
            ))),
        }
    }
}

/// Half of a bang-bang rotation about one axis: accelerate for this long,
/// then decelerate for the same time.
fn rotation_half_time(delta: f64, inertia: f64, p: &AirframeParams) -> f64 {
    (delta.abs() * inertia / (p.arm_length * p.lift_coeff)).sqrt() / p.v_max
}

/// Duration of an attitude-change stage for the given absolute pitch and
/// roll changes.
pub fn attitude_stage_duration(d_pitch: f64, d_roll: f64, p: &AirframeParams) -> f64 {
    2.0 * (rotation_half_time(d_pitch, p.inertia_y, p) + rotation_half_time(d_roll, p.inertia_x, p))
}

/// Duration of a translation stage covering `distance` under net force `force`.
pub fn translation_stage_duration(
    distance: f64,
    force: f64,
    mass: f64,
    mode: StageTwoFormula,
) -> f64 {
    match mode {
        StageTwoFormula::PaperLiteral => (2.0 * distance * force / mass).sqrt(),
        StageTwoFormula::Corrected => (2.0 * distance * mass / force).sqrt(),
    }
}

/// One constant-velocity interval `(start, end]` of the schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    /// Stage index 1..=5.
    pub stage: u8,
    /// Rotor velocities v₁…v₄, rad/s.
    pub velocities: [f64; 4],
}

impl Segment {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

/// The switching times τ₁…τ₁₄ and the rotor velocities on each interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManeuverPlan {
    pub switching_times: [f64; 14],
    /// Fourteen segments tiling `(0, τ₁₄]`.
    pub segments: Vec<Segment>,
    /// Velocities held after τ₁₄ (stage 6).
    pub hover_velocities: [f64; 4],
    pub v_max: f64,
    pub attitude: AttitudeSolution,
    /// Distance covered in each translation stage, m.
    pub translation_distance: f64,
    pub mode: StageTwoFormula,
}

impl ManeuverPlan {
    /// τ₁₄, the time the UAV reaches its destination.
    pub fn travel_time(&self) -> f64 {
        self.switching_times[13]
    }

    /// Duration of stage `s` in 1..=5.
    pub fn stage_duration(&self, stage: u8) -> f64 {
        self.segments
            .iter()
            .filter(|seg| seg.stage == stage)
            .map(Segment::duration)
            .sum()
    }

    /// Stage index of interval `j` in 0..14.
    pub fn stage_of(&self, interval: usize) -> u8 {
        self.segments[interval].stage
    }

    /// Velocities commanded at time `t` (stage 6 after τ₁₄).
    pub fn velocities_at(&self, t: f64) -> [f64; 4] {
        self.segments
            .iter()
            .find(|s| t > s.start && t <= s.end)
            .map(|s| s.velocities)
            .unwrap_or(if t > self.travel_time() {
                self.hover_velocities
            } else {
                self.segments[0].velocities
            })
    }
}

fn attitude_patterns(v: f64) -> [[f64; 4]; 4] {
    let h = v * FRAC_1_SQRT_2;
    [
        [h, 0.0, h, v],
        [h, v, h, 0.0],
        [0.0, h, v, h],
        [v, h, 0.0, h],
    ]
}

/// Builds the six-stage schedule from the origin to `dest` under `f_ext`.
///
/// Stage 1 rotates from level hover to the destination attitude, stage 3
/// to the mirrored braking attitude, stage 5 back to level. The straight
/// line is split evenly between the accelerating and braking stages.
pub fn build_plan(
    dest: Vec3,
    f_ext: Vec3,
    p: &AirframeParams,
    mode: StageTwoFormula,
) -> Result<ManeuverPlan> {
    p.validate()?;
    let attitude = solve_attitude(dest, f_ext, max_thrust(p))?;
    let v_hover = hover_velocity(f_ext, p.lift_coeff);
    if p.v_max <= v_hover {
        return Err(Error::RotorLimit {
            v_max: p.v_max,
            v_hover,
        });
    }
    if !(attitude.a_force > 0.0) {
        return Err(Error::CannotTranslate {
            force: attitude.a_force,
        });
    }

    let pitch = attitude.pitch.abs();
    let roll = attitude.roll.abs();
    let attitude_deltas = [(pitch, roll), (2.0 * pitch, 2.0 * roll), (pitch, roll)];
    let half_distance = 0.5 * dest.norm();
    let translation = translation_stage_duration(half_distance, attitude.a_force, p.mass, mode);

    let patterns = attitude_patterns(p.v_max);
    let mut segments = Vec::with_capacity(14);
    let mut t = 0.0;
    let mut push = |stage: u8, dt: f64, velocities: [f64; 4]| {
        segments.push(Segment {
            start: t,
            end: t + dt,
            stage,
            velocities,
        });
        t += dt;
    };
    for (k, &(d_pitch, d_roll)) in attitude_deltas.iter().enumerate() {
        let stage = 2 * k as u8 + 1;
        let roll_half = rotation_half_time(d_roll, p.inertia_x, p);
        let pitch_half = rotation_half_time(d_pitch, p.inertia_y, p);
        push(stage, roll_half, patterns[0]);
        push(stage, roll_half, patterns[1]);
        push(stage, pitch_half, patterns[2]);
        push(stage, pitch_half, patterns[3]);
        if stage < 5 {
            push(stage + 1, translation, [p.v_max; 4]);
        }
    }

    let mut switching_times = [0.0; 14];
    for (tau, seg) in switching_times.iter_mut().zip(&segments) {
        *tau = seg.end;
    }

    Ok(ManeuverPlan {
        switching_times,
        segments,
        hover_velocities: [v_hover; 4],
        v_max: p.v_max,
        attitude,
        translation_distance: half_distance,
        mode,
    })
}
