//! CSV and JSON rendering of mission runs and sweep tables.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::run::MissionRun;
use super::sweep::SweepTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format `{s}`"))),
        }
    }
}

fn csv_err(e: impl fmt::Display) -> Error {
    Error::Numerical(format!("csv output: {e}"))
}

/// `(quantity, unit, value)` rows summarising a run.
pub fn run_quantities(run: &MissionRun) -> Vec<(String, &'static str, f64)> {
    let mut q: Vec<(String, &'static str, f64)> = Vec::new();
    let mut push = |name: &str, unit: &'static str, v: f64| q.push((name.to_string(), unit, v));
    push("displacement_x", "m", run.displacement.x);
    push("displacement_y", "m", run.displacement.y);
    push("displacement_z", "m", run.displacement.z);
    push("hover_velocity", "rad/s", run.hover_velocity);
    if let Some(plan) = &run.plan {
        push("pitch", "rad", plan.attitude.pitch);
        push("roll", "rad", plan.attitude.roll);
        push("balance_force", "N", plan.attitude.a_force);
        for (k, t) in plan.switching_times.iter().enumerate() {
            push(&format!("tau_{}", k + 1), "s", *t);
        }
    }
    let e = &run.energy;
    for (k, v) in e.per_stage.iter().enumerate() {
        push(&format!("e_stage_{}", k + 1), "J", *v);
    }
    push("e_travel", "J", e.e_travel);
    push("e_hover", "J", e.e_hover);
    push("e_comm", "J", e.e_comm);
    push("e_consumed_total", "J", e.e_consumed_total);
    push("e_harvested", "J", e.e_harvested);
    let w = &run.wpt;
    push("source_distance", "m", w.distance);
    push("nu", "1", w.nu);
    push("p_source", "W", w.p_source);
    push("p_harvested", "W", w.p_harvested);
    push("zeta", "1", w.zeta);
    push("charge_current", "A", w.charge_current);
    let b = &run.battery;
    for r in &b.phase_ratios {
        push(&format!("gamma_motion_{}", r.phase), "1", r.motion_battery);
        push(&format!("gamma_charging_{}", r.phase), "1", r.charging_battery);
    }
    push("gamma_motion", "1", b.gamma[0]);
    push("gamma_charging", "1", b.gamma[1]);
    push("charge_gain", "1", b.charge_gain);
    push("charging_full_at", "s", b.charging_full_at.unwrap_or(f64::NAN));
    q
}

pub fn run_csv(run: &MissionRun) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["quantity", "unit", "value"]).map_err(csv_err)?;
    for (name, unit, v) in run_quantities(run) {
        w.write_record([name.as_str(), unit, &v.to_string()]).map_err(csv_err)?;
    }
    String::from_utf8(w.into_inner().map_err(csv_err)?).map_err(csv_err)
}

pub fn sweep_csv(table: &SweepTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![table.variable.column()];
    header.extend(table.variable.outputs());
    header.push("error");
    w.write_record(&header).map_err(csv_err)?;
    for row in &table.rows {
        let mut rec = vec![row.x.to_string()];
        rec.extend(row.values.iter().map(f64::to_string));
        rec.push(row.error.unwrap_or("").to_string());
        w.write_record(&rec).map_err(csv_err)?;
    }
    String::from_utf8(w.into_inner().map_err(csv_err)?).map_err(csv_err)
}

/// JSON with non-finite numbers written as `null`.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Error::Numerical(format!("json output: {e}")))
}

pub fn render_run(run: &MissionRun, format: Format) -> Result<String> {
    match format {
        Format::Csv => run_csv(run),
        Format::Json => to_json(run),
    }
}

pub fn render_sweep(table: &SweepTable, format: Format) -> Result<String> {
    match format {
        Format::Csv => sweep_csv(table),
        Format::Json => to_json(table),
    }
}
