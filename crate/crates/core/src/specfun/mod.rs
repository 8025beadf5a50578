//! Bessel special functions of real order and their zeros.

mod bessel;
mod dd;
mod integrals;
mod zeros;

pub use bessel::{
    bessel_i, bessel_i_reduced_scaled, bessel_i_scaled, bessel_j, bessel_j_ratio_derivative,
    bessel_j_reduced, half_order_j, reduced_origin_value, SERIES_LIMIT,
};
pub(crate) use bessel::{i_reduced_scaled_unchecked, j_reduced_unchecked, j_unchecked};
pub use integrals::SqrtBesselIntegral;
pub use zeros::{bessel_zeros, cached_zeros, BesselZeroTable, ITERATION_CAP, ZERO_TOLERANCE};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Bessel order `nu`, restricted to `nu > -1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Order(f64);

impl Order {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu <= -0.5 {
            return Err(Error::invalid(format!("order must be finite and > -1/2, got {nu}")));
        }
        Ok(Order(nu))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `2 nu + 2`, the homogeneity exponent of the measure.
    pub fn mu_exponent(self) -> f64 {
        2.0 * self.0 + 2.0
    }
}

impl TryFrom<f64> for Order {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Order::new(v)
    }
}

impl From<Order> for f64 {
    fn from(o: Order) -> f64 {
        o.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_bounds() {
        assert!(Order::new(-0.5).is_err());
        assert!(Order::new(f64::NAN).is_err());
        assert!(Order::new(-0.49).is_ok());
        assert_eq!(Order::new(1.5).unwrap().mu_exponent(), 5.0);
    }
}
