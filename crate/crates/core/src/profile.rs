//! Piecewise-linear power profiles and trapezoidal quadrature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default quadrature step, s.
pub const DEFAULT_STEP: f64 = 0.01;

/// A power level over time, in watts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PowerProfile {
    Constant(f64),
    /// Linear interpolation between samples, held flat outside them.
    Samples { t_s: Vec<f64>, w: Vec<f64> },
}

impl PowerProfile {
    pub fn at(&self, t: f64) -> f64 {
        match self {
            PowerProfile::Constant(w) => *w,
            PowerProfile::Samples { t_s, w } => {
                let k = t_s.partition_point(|&x| x <= t);
                if k == 0 {
                    w[0]
                } else if k == t_s.len() {
                    w[k - 1]
                } else {
                    let (t0, t1) = (t_s[k - 1], t_s[k]);
                    let s = (t - t0) / (t1 - t0);
                    w[k - 1] + s * (w[k] - w[k - 1])
                }
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, PowerProfile::Constant(_))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PowerProfile::Constant(w) if *w >= 0.0 && w.is_finite() => Ok(()),
            PowerProfile::Constant(w) => Err(Error::invalid("power", format!("must be ≥ 0, got {w}"))),
            PowerProfile::Samples { t_s, w } => {
                if t_s.is_empty() || t_s.len() != w.len() {
                    return Err(Error::invalid("power", "sample times and values must be non-empty and equal length"));
                }
                if t_s.windows(2).any(|p| !(p[1] > p[0])) {
                    return Err(Error::invalid("power", "sample times must be strictly increasing"));
                }
                if w.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
                    return Err(Error::invalid("power", "samples must be ≥ 0"));
                }
                Ok(())
            }
        }
    }
}

/// Composite trapezoid rule on `[t0, tf]` with step `dt`; the last panel
/// is shortened to land exactly on `tf`.
pub fn trapezoid(f: impl Fn(f64) -> f64, t0: f64, tf: f64, dt: f64) -> f64 {
    if !(tf > t0) {
        return 0.0;
    }
    let n = ((tf - t0) / dt).ceil().max(1.0) as usize;
    let mut sum = 0.0;
    let mut a = t0;
    let mut fa = f(a);
    for k in 1..=n {
        let b = if k == n { tf } else { t0 + k as f64 * dt };
        let fb = f(b);
        sum += 0.5 * (fa + fb) * (b - a);
        a = b;
        fa = fb;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn interpolation() {
        let p = PowerProfile::Samples {
            t_s: vec![0.0, 10.0],
            w: vec![0.0, 5.0],
        };
        assert_eq!(p.at(-1.0), 0.0);
        assert_eq!(p.at(5.0), 2.5);
        assert_eq!(p.at(20.0), 5.0);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn bad_profiles() {
        assert!(PowerProfile::Constant(-1.0).validate().is_err());
        let p = PowerProfile::Samples {
            t_s: vec![1.0, 1.0],
            w: vec![0.0, 5.0],
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn trapezoid_exact_on_linear() {
        let v = trapezoid(|t| 3.0 * t + 1.0, 0.0, 2.005, 0.01);
        assert_relative_eq!(v, 1.5 * 2.005f64.powi(2) + 2.005, max_relative = 1e-12);
        assert_eq!(trapezoid(|_| 1.0, 3.0, 3.0, 0.01), 0.0);
    }

    #[test]
    fn trapezoid_converges_on_smooth() {
        let exact = 1.0 - (-2.0f64).exp();
        let coarse = (trapezoid(|t| (-t).exp(), 0.0, 2.0, 0.1) - exact).abs();
        let fine = (trapezoid(|t| (-t).exp(), 0.0, 2.0, 0.05) - exact).abs();
        assert_relative_eq!(coarse / fine, 4.0, max_relative = 0.01);
    }
}
