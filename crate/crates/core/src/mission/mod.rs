//! Mission orchestration, parameter sweeps and report output.

pub mod config;
pub mod output;
pub mod run;
pub mod sweep;

pub use config::{MissionConfig, PRESETS};
pub use run::{run_mission, MissionRun, WptSummary};
pub use sweep::{run_sweep, SweepRow, SweepSpec, SweepTable, SweepVariable};
