//! Quadrotor UAV mission energy simulator.
//!
//! Computes the bang-bang maneuver schedule towards a destination under a
//! constant external force, the electrical energy the four motors draw,
//! laser-charging harvest, and the two-well battery state over a mission.

// `!(x > 0.0)` rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod battery;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod maneuver;
pub mod mission;
pub mod par;
pub mod powertrain;
pub mod profile;
pub mod wpt;

pub use error::{Error, Result};
pub use geometry::{to_spherical, SphericalAngles, Vec3};
