//! Intervals, the enlargement `I*`, and the two dyadic families covering `(0, 1)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::basis::MeasureMu;
use crate::error::{Error, Result};
use crate::specfun::Order;

/// Relative enlargement used by `I*`.
pub const ZETA: f64 = 0.02;

/// Half-open interval `(a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid(format!("empty or non-finite interval ({a}, {b}]")));
        }
        Ok(Interval { a, b })
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.a && x <= self.b
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        other.a >= self.a && other.b <= self.b
    }

    /// `(1 + zeta) I` intersected with `(0, 1)`.
    pub fn star(&self) -> Interval {
        let r = 0.5 * (1.0 + ZETA) * self.len();
        let c = self.center();
        Interval {
            a: (c - r).max(0.0),
            b: (c + r).min(1.0),
        }
    }

    /// `star` applied `k` times; `I**` is `stars(2)`, `I***` is `stars(3)`.
    pub fn stars(&self, k: usize) -> Interval {
        (0..k).fold(*self, |i, _| i.star())
    }

    pub fn mu(&self, order: Order) -> f64 {
        MeasureMu::new(order).interval(self.a, self.b)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}]", self.a, self.b)
    }
}

/// Which dyadic family: intervals accumulating at 1, or at both 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `(1 - 2^{-j}, 1 - 2^{-j-1}]`, `j >= 0`, with the measure `mu`.
    I,
    /// `I_j` for `j >= 1` and `(2^{j-1}, 2^j]` for `j <= -1`, with Lebesgue measure.
    J,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::I => "I",
            Family::J => "J",
        }
    }

    pub fn parse(s: &str) -> Result<Family> {
        match s {
            "I" | "i" | "calL" | "Lcal" => Ok(Family::I),
            "J" | "j" | "L" => Ok(Family::J),
            _ => Err(Error::invalid(format!("unknown family '{s}' (use I or J)"))),
        }
    }

    pub fn is_valid_index(self, j: i32) -> bool {
        match self {
            Family::I => j >= 0,
            Family::J => j != 0,
        }
    }

    pub fn interval(self, j: i32) -> Result<Interval> {
        if !self.is_valid_index(j) || j.abs() > 1000 {
            return Err(Error::invalid(format!("index {j} not in the {} family", self.name())));
        }
        Ok(if j >= 0 {
            Interval {
                a: 1.0 - 0.5f64.powi(j),
                b: 1.0 - 0.5f64.powi(j + 1),
            }
        } else {
            Interval {
                a: 2f64.powi(j - 1),
                b: 2f64.powi(j),
            }
        })
    }

    /// Index of the member containing `x in (0, 1)`.
    pub fn index_of(self, x: f64) -> Result<i32> {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::invalid(format!("point {x} outside (0, 1)")));
        }
        let guess = match self {
            Family::J if x <= 0.5 => x.log2().ceil() as i32,
            _ => (-(1.0 - x).log2()).floor() as i32,
        };
        // rounding in the logarithm can be off by one at the endpoints
        for j in [guess, guess - 1, guess + 1] {
            if self.is_valid_index(j) && self.interval(j)?.contains(x) {
                return Ok(j);
            }
        }
        Err(Error::invalid(format!("no member of the {} family holds {x}", self.name())))
    }

    /// Member immediately to the left along `(0, 1)`.
    pub fn prev(self, j: i32) -> Option<i32> {
        match (self, j) {
            (Family::I, 0) => None,
            (Family::J, 1) => Some(-1),
            _ => Some(j - 1),
        }
    }

    /// Member immediately to the right along `(0, 1)`.
    pub fn next(self, j: i32) -> i32 {
        if self == Family::J && j == -1 {
            1
        } else {
            j + 1
        }
    }

    /// Size of a member in the family's own measure.
    pub fn measure(self, order: Order, iv: &Interval) -> f64 {
        match self {
            Family::I => iv.mu(order),
            Family::J => iv.len(),
        }
    }

    /// Indices with `|j| <= depth`, in increasing position along `(0, 1)`.
    pub fn indices(self, depth: i32) -> Vec<i32> {
        match self {
            Family::I => (0..=depth).collect(),
            Family::J => (-depth..=-1).chain(1..=depth).collect(),
        }
    }
}

/// A family truncated at `|j| <= depth` together with the enlargement constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicCover {
    pub family: Family,
    pub depth: i32,
    pub zeta: f64,
}

impl DyadicCover {
    pub fn new(family: Family, depth: i32) -> Result<Self> {
        if !(1..=60).contains(&depth) {
            return Err(Error::invalid("cover depth must lie in 1..=60"));
        }
        Ok(DyadicCover {
            family,
            depth,
            zeta: ZETA,
        })
    }

    pub fn members(&self) -> Vec<(i32, Interval)> {
        self.family
            .indices(self.depth)
            .into_iter()
            .map(|j| (j, self.family.interval(j).expect("valid index")))
            .collect()
    }
}
