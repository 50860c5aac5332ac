use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate direction: {0} has zero magnitude")]
    DegenerateDirection(&'static str),

    #[error("infeasible force: |Gamma| = {gamma:.6} > 1, the UAV cannot aim at the destination")]
    InfeasibleForce { gamma: f64 },

    #[error("cannot translate: net force towards the destination is {force:.6} N")]
    CannotTranslate { force: f64 },

    #[error("maximum rotor velocity {v_max:.4} rad/s does not exceed hover velocity {v_hover:.4} rad/s")]
    RotorLimit { v_max: f64, v_hover: f64 },

    #[error("infeasible hover: hover velocity {v_hover:.4} rad/s exceeds v_max = {v_max:.4} rad/s")]
    InfeasibleHover { v_hover: f64, v_max: f64 },

    #[error("no line of sight: transmission efficiency is zero")]
    NoLineOfSight,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("charge current {current:.4} A exceeds the C-rating cap {cap:.4} A")]
    ChargeCapExceeded { current: f64, cap: f64 },

    #[error("battery {battery} empty during {phase} at t = {time:.6} s")]
    BatteryEmpty {
        battery: usize,
        phase: &'static str,
        time: f64,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Process exit code for the CLI: 1 config, 2 infeasible mission, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter { .. } | Error::Config(_) | Error::ChargeCapExceeded { .. } => 1,
            Error::Numerical(_) => 3,
            _ => 2,
        }
    }

    /// Short machine-readable tag used in sweep output rows.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DegenerateDirection(_) => "degenerate_direction",
            Error::InfeasibleForce { .. } => "infeasible_force",
            Error::CannotTranslate { .. } => "cannot_translate",
            Error::RotorLimit { .. } => "rotor_limit",
            Error::InfeasibleHover { .. } => "infeasible_hover",
            Error::NoLineOfSight => "no_line_of_sight",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::ChargeCapExceeded { .. } => "charge_cap_exceeded",
            Error::BatteryEmpty { .. } => "battery_empty",
            Error::Config(_) => "config",
            Error::Numerical(_) => "numerical",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
