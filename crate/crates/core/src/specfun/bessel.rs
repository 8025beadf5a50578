//! Bessel functions of the first kind and modified Bessel functions of real order.
//!
//! `J` uses the ascending series (summed in double-double) for arguments up to
//! [`SERIES_LIMIT`] or whenever the order exceeds the argument. Beyond that it
//! uses the large-argument Hankel expansion at a fractional base order and
//! climbs to the target order by forward recurrence, which is stable while the
//! order stays below the argument.

use std::f64::consts::PI;

use statrs::function::gamma::{gamma, ln_gamma};

use super::dd::Dd;
use super::Order;
use crate::error::{Error, Result};

/// Argument at which `J` switches from the ascending series to the Hankel expansion.
pub const SERIES_LIMIT: f64 = 25.0;

fn check_arg(x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::invalid(format!("argument must be finite, got {x}")));
    }
    if x < 0.0 {
        return Err(Error::invalid(format!("argument must be nonnegative, got {x}")));
    }
    Ok(())
}

/// `1 / (2^nu Gamma(nu + 1))`, the value of `z^{-nu} J_nu(z)` at the origin.
pub fn reduced_origin_value(nu: f64) -> f64 {
    if nu + 1.0 > 150.0 {
        (-nu * std::f64::consts::LN_2 - ln_gamma(nu + 1.0)).exp()
    } else {
        1.0 / (2f64.powf(nu) * gamma(nu + 1.0))
    }
}

/// Sum of `sum_k (-z^2/4)^k / (k! (nu+1)_k)` in double-double.
fn j_series_sum(nu: f64, z: f64) -> f64 {
    let q = 0.25 * z * z;
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    let mut peak = 1.0f64;
    let mut k = 1.0f64;
    loop {
        term = term.neg() * q;
        // k + nu is generally inexact in binary; keep it in double-double.
        term = term.div_f64(k).div(Dd::sum_of(k, nu));
        sum = sum + term;
        let mag = term.hi.abs();
        peak = peak.max(mag);
        if k > q.sqrt() && (mag < 1e-18 * sum.hi.abs() || mag < 1e-33 * peak) {
            break;
        }
        k += 1.0;
        if k > 500.0 {
            break;
        }
    }
    sum.to_f64()
}

/// Hankel asymptotic expansion of `J_m(z)` for large `z`.
fn hankel_single(m: f64, z: f64) -> f64 {
    let (sz, cz) = z.sin_cos();
    let amp = (2.0 / (PI * z)).sqrt();
    let four_m2 = 4.0 * m * m;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a *= (four_m2 - odd * odd) / (8.0 * kf * z);
        let mag = a.abs();
        if mag > prev && kf > m {
            break;
        }
        prev = mag;
        // Signs: P takes (-1)^{k/2} a_k for even k, Q takes (-1)^{(k-1)/2} a_k for odd k.
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if mag < 1e-17 {
            break;
        }
    }
    let c = (0.5 * m + 0.25) * PI;
    let (sc, cc) = c.sin_cos();
    let cos_chi = cz * cc + sz * sc;
    let sin_chi = sz * cc - cz * sc;
    amp * (p * cos_chi - q * sin_chi)
}

/// Hankel asymptotic pair `(J_mu(z), J_{mu+1}(z))` for large `z`.
fn hankel_pair(mu: f64, z: f64) -> (f64, f64) {
    (hankel_single(mu, z), hankel_single(mu + 1.0, z))
}

/// `(J_nu(x), J_{nu+1}(x))` for `x > 0`.
pub(crate) fn j_pair_unchecked(nu: f64, x: f64) -> (f64, f64) {
    if x <= SERIES_LIMIT || nu + 1.0 >= x {
        let r0 = reduced_origin_value(nu);
        let r1 = reduced_origin_value(nu + 1.0);
        let xn = x.powf(nu);
        let a = xn * r0 * j_series_sum(nu, x);
        let b = xn * x * r1 * j_series_sum(nu + 1.0, x);
        return (a, b);
    }
    let m = if nu >= 1.0 { nu.floor() } else { 0.0 };
    let mu = nu - m;
    let (mut lo, mut hi) = hankel_pair(mu, x);
    let steps = m as usize;
    let mut order = mu + 1.0;
    for _ in 0..steps {
        let next = 2.0 * order / x * hi - lo;
        lo = hi;
        hi = next;
        order += 1.0;
    }
    (lo, hi)
}

/// `J_nu(x)`.
pub fn bessel_j(order: Order, x: f64) -> Result<f64> {
    check_arg(x)?;
    Ok(j_unchecked(order.value(), x))
}

pub(crate) fn j_unchecked(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
    }
    if x <= SERIES_LIMIT || nu >= x {
        return x.powf(nu) * reduced_origin_value(nu) * j_series_sum(nu, x);
    }
    if nu < 1.0 {
        return hankel_single(nu, x);
    }
    j_pair_unchecked(nu, x).0
}

/// `z^{-nu} J_nu(z)`, finite and smooth at the origin.
pub fn bessel_j_reduced(order: Order, z: f64) -> Result<f64> {
    check_arg(z)?;
    Ok(j_reduced_unchecked(order.value(), z))
}

pub(crate) fn j_reduced_unchecked(nu: f64, z: f64) -> f64 {
    if z <= SERIES_LIMIT || nu >= z {
        reduced_origin_value(nu) * j_series_sum(nu, z)
    } else {
        j_pair_unchecked(nu, z).0 * z.powf(-nu)
    }
}

/// `d/dx [x^{-nu} J_nu(x)] = -x^{-nu} J_{nu+1}(x)`.
pub fn bessel_j_ratio_derivative(order: Order, x: f64) -> Result<f64> {
    check_arg(x)?;
    if x == 0.0 {
        return Err(Error::invalid("derivative requires x > 0"));
    }
    let nu = order.value();
    Ok(-x * j_reduced_unchecked(nu + 1.0, x))
}

/// Ascending series for `e^{-x} x^{-nu} I_nu(x)`.
fn i_reduced_scaled_series(nu: f64, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut k = 1.0f64;
    loop {
        term *= q / (k * (k + nu));
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
        k += 1.0;
        if k > 1000.0 {
            break;
        }
    }
    reduced_origin_value(nu) * sum * (-x).exp()
}

/// Large-argument expansion of `e^{-x} I_nu(x)`.
fn i_scaled_asymptotic(nu: f64, x: f64) -> f64 {
    let four_m2 = 4.0 * nu * nu;
    let mut a = 1.0f64;
    let mut sum = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 1..80 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a *= -(four_m2 - odd * odd) / (8.0 * kf * x);
        let mag = a.abs();
        if mag > prev && kf > nu {
            break;
        }
        prev = mag;
        sum += a;
        if mag < 1e-17 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

fn i_threshold(nu: f64) -> f64 {
    30.0f64.max(2.0 * nu * nu)
}

/// `e^{-x} x^{-nu} I_nu(x)`; stays finite for every `x >= 0`.
pub fn bessel_i_reduced_scaled(order: Order, x: f64) -> Result<f64> {
    check_arg(x)?;
    Ok(i_reduced_scaled_unchecked(order.value(), x))
}

pub(crate) fn i_reduced_scaled_unchecked(nu: f64, x: f64) -> f64 {
    if x <= i_threshold(nu) {
        i_reduced_scaled_series(nu, x)
    } else {
        i_scaled_asymptotic(nu, x) * x.powf(-nu)
    }
}

/// `e^{-x} I_nu(x)`.
pub fn bessel_i_scaled(order: Order, x: f64) -> Result<f64> {
    check_arg(x)?;
    let nu = order.value();
    if x == 0.0 {
        return Ok(if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    if x <= i_threshold(nu) {
        Ok(i_reduced_scaled_series(nu, x) * x.powf(nu))
    } else {
        Ok(i_scaled_asymptotic(nu, x))
    }
}

/// `I_nu(x)`, with an overflow error once the value leaves the double range.
pub fn bessel_i(order: Order, x: f64) -> Result<f64> {
    let scaled = bessel_i_scaled(order, x)?;
    if scaled == 0.0 || x == 0.0 {
        return Ok(scaled);
    }
    let log_val = scaled.ln() + x;
    if log_val > 709.0 {
        return Err(Error::Overflow("bessel_i"));
    }
    Ok(scaled * x.exp())
}

/// Closed form `J_{1/2}(x) = sqrt(2/(pi x)) sin x`, used as a reference.
pub fn half_order_j(x: f64) -> f64 {
    (2.0 / (PI * x)).sqrt() * x.sin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn ord(nu: f64) -> Order {
        Order::new(nu).unwrap()
    }

    /// Plain f64 series with an explicit term count, used as an oracle at small x.
    fn series_oracle(nu: f64, x: f64, terms: usize) -> f64 {
        let mut s = 0.0;
        for k in 0..terms {
            let lg = ln_gamma(k as f64 + 1.0) + ln_gamma(k as f64 + nu + 1.0);
            let mag = ((2.0 * k as f64 + nu) * (0.5 * x).ln() - lg).exp();
            s += if k % 2 == 0 { mag } else { -mag };
        }
        s
    }

    #[test]
    fn half_order_closed_forms() {
        let v = bessel_j(ord(0.5), FRAC_PI_2).unwrap();
        assert!((v - 2.0 / PI).abs() < 1e-14);
        assert!(bessel_j(ord(0.5), PI).unwrap().abs() < 1e-15);
    }

    #[test]
    fn half_order_matches_sine_everywhere() {
        for i in 1..4000 {
            let x = i as f64 * 0.05;
            let v = bessel_j(ord(0.5), x).unwrap();
            assert!((v - half_order_j(x)).abs() < 1e-12, "x={x} {v}");
        }
    }

    #[test]
    fn three_halves_closed_form() {
        // J_{3/2}(x) = sqrt(2/(pi x)) (sin x / x - cos x)
        for i in 1..2000 {
            let x = i as f64 * 0.1;
            let v = j_unchecked(1.5, x);
            let e = (2.0 / (PI * x)).sqrt() * (x.sin() / x - x.cos());
            assert!((v - e).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn matches_plain_series_at_small_argument() {
        for &nu in &[0.0, 0.3, 1.0, 2.5, -0.4] {
            for &x in &[0.1, 0.7, 2.0, 4.5] {
                let v = j_unchecked(nu, x);
                let e = series_oracle(nu, x, 40);
                assert!((v - e).abs() < 1e-13, "nu={nu} x={x} {v} {e}");
            }
        }
    }

    #[test]
    fn regimes_agree_at_switch() {
        for &nu in &[0.0, 0.5, 1.0, 2.5, -0.3, 3.7] {
            for &x in &[SERIES_LIMIT + 1e-9, 27.0, 31.3] {
                let asym = j_pair_unchecked(nu, x).0;
                let ser = x.powf(nu) * reduced_origin_value(nu) * j_series_sum(nu, x);
                assert!((asym - ser).abs() < 1e-13, "nu={nu} x={x} {asym} {ser}");
            }
        }
    }

    #[test]
    fn ratio_derivative_examples() {
        let v = bessel_j_ratio_derivative(ord(0.5), PI).unwrap();
        let e = -PI.powf(-0.5) * 2f64.sqrt() / PI;
        assert!((v - e).abs() < 1e-14);
        let z = 2.404825557695773;
        let d = bessel_j_ratio_derivative(ord(0.0), z).unwrap();
        let h = 1e-6;
        let fd = (j_unchecked(0.0, z + h) - j_unchecked(0.0, z - h)) / (2.0 * h);
        assert!((d - fd).abs() < 1e-6);
        assert!((d + 0.519147).abs() < 1e-6);
        let tiny = bessel_j_ratio_derivative(ord(2.0), 1e-9).unwrap();
        assert!(tiny.abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(bessel_j(ord(0.0), -1.0).is_err());
        assert!(bessel_j(ord(0.0), f64::NAN).is_err());
        assert!(bessel_j(ord(0.0), f64::INFINITY).is_err());
        assert!(bessel_j_ratio_derivative(ord(0.0), 0.0).is_err());
        assert!(bessel_i(ord(0.0), -0.5).is_err());
    }

    #[test]
    fn modified_examples() {
        let v = bessel_i(ord(0.5), 1.0).unwrap();
        assert!((v - (2.0 / PI).sqrt() * 1f64.sinh()).abs() < 1e-14);
        assert_eq!(bessel_i(ord(0.0), 0.0).unwrap(), 1.0);
        let mut s = 0.0;
        for k in 0..30 {
            let kf = k as f64;
            s += 1f64.powf(2.0 * kf + 1.0) / (gamma(kf + 1.0) * gamma(kf + 2.0));
        }
        assert!((bessel_i(ord(1.0), 2.0).unwrap() - s).abs() < 1e-14);
    }

    #[test]
    fn modified_regimes_agree() {
        for &nu in &[0.0, 0.5, 1.5, 2.5, -0.3] {
            let x = i_threshold(nu);
            let a = i_reduced_scaled_series(nu, x);
            let b = i_scaled_asymptotic(nu, x) * x.powf(-nu);
            assert!(((a - b) / a).abs() < 1e-13, "nu={nu}");
        }
        // I_{1/2}(x) e^{-x} = (1 - e^{-2x}) / sqrt(2 pi x)
        for &x in &[35.0, 100.0, 1e4, 1e8] {
            let v = bessel_i_scaled(ord(0.5), x).unwrap();
            let e = -(-2.0 * x).exp_m1() / (2.0 * PI * x).sqrt();
            assert!(((v - e) / e).abs() < 1e-14);
        }
    }

    #[test]
    fn modified_overflow_is_reported() {
        assert!(matches!(bessel_i(ord(0.0), 800.0), Err(Error::Overflow(_))));
        assert!(bessel_i_scaled(ord(0.0), 800.0).unwrap().is_finite());
    }
}
