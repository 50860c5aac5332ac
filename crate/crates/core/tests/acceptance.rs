//! Acceptance suite: one PASS/FAIL line per criterion.

use std::process::Command;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use uavsim::battery::{closed_form_levels, step_closed_form, BatteryParams, KibamState};
use uavsim::maneuver::hover_velocity;
use uavsim::mission::sweep::linspace;
use uavsim::mission::{run_mission, run_sweep, MissionConfig, SweepSpec, SweepTable, SweepVariable};
use uavsim::powertrain::{energy_constants, instantaneous_power, motor_current, motor_voltage};
use uavsim::profile::PowerProfile;
use uavsim::wpt::SourcePolicy;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn table1() -> MissionConfig {
    MissionConfig::from_preset("table1").unwrap()
}

fn sweep(variable: SweepVariable, grid: Vec<f64>, config: MissionConfig) -> SweepTable {
    run_sweep(&SweepSpec { variable, grid, config }).unwrap()
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite()) && xs.windows(2).all(|w| w[1] < w[0])
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite()) && xs.windows(2).all(|w| w[1] > w[0])
}

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn hover_velocity_value() -> Outcome {
    let cfg = table1();
    let v = hover_velocity(cfg.external_force, cfg.airframe.lift_coeff);
    check((v - 956.29).abs() <= 0.05, format!("v_h = {v:.4} rad/s, want 956.29 ± 0.05"))
}

fn charge_conservation() -> Outcome {
    let p = table1().battery;
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let y1 = rng.gen_range(0.0..=p.available_max());
        let y2 = rng.gen_range(0.0..=p.bound_max());
        let s = KibamState { y1, y2, t: rng.gen_range(0.0..1e4) };
        let current = rng.gen_range(-200.0..=10.0);
        let delta = rng.gen_range(0.0..=3600.0);
        let out = step_closed_form(&s, current, delta, &p).map_err(|e| e.to_string())?;
        let expected = current * (out.state.t - s.t);
        let scale = expected.abs().max(s.total()).max(1.0);
        worst = worst.max((out.state.total() - s.total() - expected).abs() / scale);
    }
    let elapsed = start.elapsed().as_secs_f64();
    check(
        worst <= 1e-9 && elapsed < 1.0,
        format!("max relative error {worst:.2e} (≤ 1e-9) in {elapsed:.3} s (< 1 s)"),
    )
}

/// Fixed-step RK4 on the raw two-well equations.
fn rk4(s: &KibamState, current: f64, delta: f64, p: &BatteryParams, dt: f64) -> (f64, f64) {
    let c = p.split;
    let k = p.flow_rate;
    let f = |y1: f64, y2: f64| {
        let flow = k * (y2 / (1.0 - c) - y1 / c);
        (current + flow, -flow)
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

fn closed_form_vs_rk4() -> Outcome {
    let p = table1().battery;
    let mut worst: f64 = 0.0;
    let starts = [
        KibamState::full(&p),
        KibamState::at_soc(&p, 0.5),
        KibamState { y1: 0.3 * p.available_max(), y2: p.bound_max(), t: 0.0 },
    ];
    for s in &starts {
        for delta in [20.0, 3600.0] {
            for magnitude in [0.0, 10.0, 102.0, 200.0] {
                for current in [magnitude, -magnitude] {
                    let (c1, c2) = closed_form_levels(s, current, delta, &p);
                    let (r1, r2) = rk4(s, current, delta, &p, 0.05);
                    for (c, r) in [(c1, r1), (c2, r2)] {
                        worst = worst.max((c - r).abs() / r.abs().max(1.0));
                    }
                }
            }
        }
    }
    check(worst <= 1e-6, format!("max relative difference {worst:.2e} (≤ 1e-6)"))
}

fn powertrain_identity() -> Outcome {
    let cfg = table1();
    let c = energy_constants(&cfg.motor);
    let mut worst: f64 = 0.0;
    for v in linspace(0.0, cfg.airframe.v_max, 1000) {
        let i = motor_current(v, 0.0, &cfg.motor);
        let ei = motor_voltage(i, v, &cfg.motor) * i;
        worst = worst.max((instantaneous_power(v, 0.0, &c) - ei).abs() / ei.abs());
    }
    check(worst <= 1e-9, format!("max relative difference {worst:.2e} (≤ 1e-9)"))
}

fn rotor_velocity_monotone() -> Outcome {
    let cfg = table1();
    let v_max = cfg.airframe.v_max;
    let t = sweep(SweepVariable::RotorVelocity, linspace(956.3, v_max, 50), cfg.clone());
    let tau = t.column("tau14_s").unwrap();
    let e = t.column("e_travel_J").unwrap();
    let v_h = hover_velocity(cfg.external_force, cfg.airframe.lift_coeff);
    let near = sweep(SweepVariable::RotorVelocity, vec![v_h + 1e-3], cfg);
    let (tau_near, e_near) = (near.rows[0].values[0], near.rows[0].values[1]);
    let (tau_max, e_max) = (tau[49], e[49]);
    check(
        strictly_decreasing(&tau) && strictly_decreasing(&e) && tau_near > 10.0 * tau_max && e_near > 10.0 * e_max,
        format!(
            "τ₁₄ {:.2} → {tau_max:.3} s, E_trav {:.0} → {e_max:.0} J strictly decreasing; at v_h + 1e-3: τ₁₄ = {tau_near:.0} s, E_trav = {e_near:.3e} J (> 10× v_max values)",
            tau[0], e[0]
        ),
    )
}

fn axis_ordering() -> Outcome {
    let e = |var| sweep(var, vec![50.0], table1()).rows[0].values[1];
    let (x, y, z) = (
        e(SweepVariable::DistanceX),
        e(SweepVariable::DistanceY),
        e(SweepVariable::DistanceZ),
    );
    check(
        z > x && x > y,
        format!("E_trav at 50 m: z {z:.0} J > x {x:.0} J > y {y:.0} J"),
    )
}

fn wind_sweeps() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    // x̂ and ŷ: symmetric, strictly decreasing to 0 then increasing
    let grid = linspace(-10.0, 10.0, 41);
    for var in [SweepVariable::WindX, SweepVariable::WindY] {
        let e = sweep(var, grid.clone(), table1()).column("e_hover_J").unwrap();
        let mid = 20;
        let symmetric = (0..=mid).all(|k| (e[k] - e[40 - k]).abs() <= 1e-9 * e[k]);
        let shape = strictly_decreasing(&e[..=mid]) && strictly_increasing(&e[mid..]);
        let convex = e.windows(3).all(|w| w[0] + w[2] - 2.0 * w[1] > 0.0);
        ok &= symmetric && shape && convex;
        notes.push(format!(
            "{var}: symmetric={symmetric} min at 0 N={shape} convex={convex}"
        ));
    }
    // ẑ: non-increasing on [0, 12.74], increasing beyond while hover is feasible
    let z = sweep(SweepVariable::WindZ, linspace(0.0, 29.0, 291), table1());
    let e = z.column("e_hover_J").unwrap();
    let split = z.rows.iter().position(|r| r.x >= 12.74).unwrap();
    let down = e[..split].windows(2).all(|w| w[1] <= w[0]);
    let up = strictly_increasing(&e[split..]);
    ok &= down && up;
    notes.push(format!("wind-z: non-increasing to 12.74 N={down} increasing beyond={up}"));

    // feasible ẑ window from the balance condition
    let w = sweep(SweepVariable::WindZ, linspace(-10.0, 45.0, 5501), table1());
    let feasible: Vec<f64> = w.rows.iter().filter(|r| r.values[2] == 1.0).map(|r| r.x).collect();
    let (lo, hi) = (feasible[0], *feasible.last().unwrap());
    let contiguous = feasible.len() == ((hi - lo) / 0.01).round() as usize + 1;
    let brackets = (lo - -4.0).abs() <= 0.4 && (hi - 35.06).abs() <= 3.506 && lo <= 0.0 && hi >= 12.74;
    let hover_hi = w
        .rows
        .iter()
        .filter(|r| r.values[0].is_finite())
        .map(|r| r.x)
        .fold(f64::NEG_INFINITY, f64::max);
    ok &= contiguous && brackets;
    notes.push(format!(
        "balance window [{lo:.2}, {hi:.2}] N vs [−4, 35.06] ± 10% (hover-feasible up to {hover_hi:.2} N)"
    ));
    check(ok, notes.join("; "))
}

fn harvest_monotone() -> Outcome {
    let mut cfg = table1();
    cfg.source = SourcePolicy::Fixed(PowerProfile::Constant(300.0));
    let d = sweep(SweepVariable::SourceDistance, linspace(10.0, 3000.0, 50), cfg.clone());
    let p = sweep(SweepVariable::SourcePower, linspace(10.0, 1000.0, 50), cfg);
    let ok = strictly_decreasing(&d.column("e_harvested_J").unwrap())
        && strictly_decreasing(&d.column("zeta").unwrap())
        && strictly_increasing(&p.column("e_harvested_J").unwrap())
        && strictly_increasing(&p.column("zeta").unwrap());
    let z = d.column("zeta").unwrap();
    let zp = p.column("zeta").unwrap();
    check(
        ok,
        format!(
            "P_s = 300 W over 10–3000 m: ζ {:.3} → {:.3}; 100 m over 10–1000 W: ζ {:.3} → {:.3}",
            z[0], z[49], zp[0], zp[49]
        ),
    )
}

fn wpt_gain() -> Outcome {
    let start = Instant::now();
    let on = MissionConfig::from_preset("table1-b10800").unwrap();
    let mut off = on.clone();
    off.wpt_enabled = false;
    let a = run_mission(&on).map_err(|e| e.to_string())?;
    let b = run_mission(&off).map_err(|e| e.to_string())?;
    let gain = 100.0 * (a.battery.charge_gain - b.battery.charge_gain);
    let elapsed = start.elapsed().as_secs_f64();
    check(
        (gain - 2.0).abs() <= 0.3 && elapsed < 1.0,
        format!("charged-battery gain {gain:.3} pp of capacity (2.0 ± 0.3) in {elapsed:.3} s"),
    )
}

fn deterministic_cli() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_uavsim"))
            .args(["run", "--preset", "table1"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    check(
        a.status.success() && b.status.success() && !a.stdout.is_empty() && a.stdout == b.stdout,
        format!("{} bytes, identical: {}", a.stdout.len(), a.stdout == b.stdout),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("hover velocity", hover_velocity_value),
        ("charge conservation", charge_conservation),
        ("closed form vs RK4", closed_form_vs_rk4),
        ("powertrain identity", powertrain_identity),
        ("rotor-velocity monotonicity", rotor_velocity_monotone),
        ("axis ordering", axis_ordering),
        ("wind sweeps", wind_sweeps),
        ("harvest monotonicity", harvest_monotone),
        ("WPT gain", wpt_gain),
        ("CLI determinism", deterministic_cli),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", k + 1)
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
