//! Geometric time grids standing in for the supremum over `t > 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_T_MIN: f64 = 1e-4;
pub const DEFAULT_T_MAX: f64 = 10.0;
pub const DEFAULT_RATIO: f64 = 1.25;
/// Boundary between the small-time and large-time parts of the supremum.
pub const SPLIT: f64 = 1.0;

/// Times `ratio^k` (anchored at 1) clipped to `[t_min, t_max]`, both ends included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_min: f64,
    t_max: f64,
    log_step: f64,
    with_trace: bool,
    times: Vec<f64>,
}

impl TimeGrid {
    /// Grid for the full supremum; enforces `t_min <= 1e-4`, `t_max >= 10`, `ratio <= 1.25`.
    /// The `t -> 0` limit `|f(x)|` is included as an extra candidate.
    pub fn geometric(t_min: f64, t_max: f64, ratio: f64) -> Result<Self> {
        if t_min > DEFAULT_T_MIN || t_max < DEFAULT_T_MAX {
            return Err(Error::invalid(format!(
                "time grid must cover [{DEFAULT_T_MIN}, {DEFAULT_T_MAX}], got [{t_min}, {t_max}]"
            )));
        }
        if ratio > DEFAULT_RATIO {
            return Err(Error::invalid(format!("grid ratio {ratio} exceeds {DEFAULT_RATIO}")));
        }
        let mut g = Self::span(t_min, t_max, ratio)?;
        g.with_trace = true;
        Ok(g)
    }

    pub fn standard() -> Self {
        Self::geometric(DEFAULT_T_MIN, DEFAULT_T_MAX, DEFAULT_RATIO).expect("default grid is valid")
    }

    /// Grid on an arbitrary range, without the trace candidate; used for restricted suprema.
    pub fn span(t_min: f64, t_max: f64, ratio: f64) -> Result<Self> {
        if !(t_min > 0.0 && t_max >= t_min && t_max.is_finite()) {
            return Err(Error::invalid(format!("bad time range [{t_min}, {t_max}]")));
        }
        if !(ratio > 1.0 && ratio.is_finite()) {
            return Err(Error::invalid(format!("grid ratio must exceed 1, got {ratio}")));
        }
        Ok(Self::with_log_step(t_min, t_max, ratio.ln()))
    }

    fn with_log_step(t_min: f64, t_max: f64, step: f64) -> Self {
        let lo = (t_min.ln() / step).ceil() as i64;
        let hi = (t_max.ln() / step).floor() as i64;
        let mut times = vec![t_min];
        for k in lo..=hi {
            let t = (k as f64 * step).exp();
            if t > t_min && t < t_max {
                times.push(t);
            }
        }
        if t_max > t_min {
            times.push(t_max);
        }
        TimeGrid {
            t_min,
            t_max,
            log_step: step,
            with_trace: false,
            times,
        }
    }

    /// Same range with ratio `sqrt(ratio)`; contains every time of `self`.
    pub fn refined(&self) -> Self {
        // halving the log step keeps every old time bit-for-bit
        let mut g = Self::with_log_step(self.t_min, self.t_max, 0.5 * self.log_step);
        g.with_trace = self.with_trace;
        g
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn ratio(&self) -> f64 {
        self.log_step.exp()
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn with_trace(&self) -> bool {
        self.with_trace
    }

    pub fn without_trace(mut self) -> Self {
        self.with_trace = false;
        self
    }
}
