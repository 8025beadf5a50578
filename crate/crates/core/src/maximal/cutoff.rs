//! Smooth cutoff equal to 1 on `I_0**` and 0 off `I_0***`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy::{Family, Interval};
use crate::smoothstep;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffRho {
    pub inner: Interval,
    pub outer: Interval,
    /// Degree of the polynomial transition.
    pub degree: u32,
}

impl CutoffRho {
    pub fn standard() -> Self {
        let i0 = Family::I.interval(0).expect("index 0 exists");
        CutoffRho {
            inner: i0.stars(2),
            outer: i0.stars(3),
            degree: 5,
        }
    }

    pub fn new(inner: Interval, outer: Interval) -> Result<Self> {
        if !(outer.b > inner.b) || outer.a > inner.a {
            return Err(Error::invalid("outer interval must extend past the inner one on the right"));
        }
        Ok(CutoffRho { inner, outer, degree: 5 })
    }

    /// Support of `rho'` and `rho''`.
    pub fn transition(&self) -> (f64, f64) {
        (self.inner.b, self.outer.b)
    }

    fn arg(&self, x: f64) -> f64 {
        let (a, b) = self.transition();
        (x - a) / (b - a)
    }

    pub fn value(&self, x: f64) -> f64 {
        1.0 - smoothstep::value(self.arg(x))
    }

    pub fn first(&self, x: f64) -> f64 {
        let (a, b) = self.transition();
        -smoothstep::first(self.arg(x)) / (b - a)
    }

    pub fn second(&self, x: f64) -> f64 {
        let (a, b) = self.transition();
        -smoothstep::second(self.arg(x)) / ((b - a) * (b - a))
    }
}
