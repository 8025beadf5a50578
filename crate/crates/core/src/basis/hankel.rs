//! Hankel transform on `L^2((0, inf), mu)` with kernel `(xi y)^{-nu} J_nu(xi y)`.

use statrs::function::gamma::ln_gamma;

use super::{MeasureTag, SampledFunction};
use crate::error::{Error, Result};
use crate::quadrature::push_panel;
use crate::specfun::{j_reduced_unchecked, j_unchecked, Order};

/// Normalization in front of the kernel. With this kernel and measure the transform
/// is already an involutive isometry.
pub const HANKEL_CONSTANT: f64 = 1.0;

pub fn hankel_kernel(order: Order, xi: f64, y: f64) -> f64 {
    HANKEL_CONSTANT * j_reduced_unchecked(order.value(), xi * y)
}

fn check_xi(xi: f64) -> Result<()> {
    if !(xi > 0.0) || !xi.is_finite() {
        return Err(Error::invalid(format!("frequency must be positive, got {xi}")));
    }
    Ok(())
}

/// `int f(y) phi(xi y) dmu(y)` by the quadrature carried by `f`.
pub fn hankel_transform(f: &SampledFunction, xi: f64) -> Result<f64> {
    check_xi(xi)?;
    f.expect_tag(MeasureTag::Mu)?;
    let order = f.grid().order();
    Ok(f.nodes()
        .iter()
        .zip(f.values())
        .zip(f.weights())
        .map(|((&y, &v), &w)| w * v * hankel_kernel(order, xi, y))
        .sum())
}

/// Transform of a closure supported in `(0, radius)`, using unit panels with
/// `nodes` Gauss-Legendre points each.
pub fn hankel_transform_fn(
    order: Order,
    f: impl Fn(f64) -> f64,
    radius: f64,
    xi: f64,
    nodes: usize,
) -> Result<f64> {
    check_xi(xi)?;
    if !(radius > 0.0) {
        return Err(Error::invalid("radius must be positive"));
    }
    let panels = (radius * xi.max(1.0) / 4.0).ceil().max(radius.ceil()) as usize;
    let mut ys = Vec::new();
    let mut ws = Vec::new();
    let h = radius / panels as f64;
    for k in 0..panels {
        push_panel(&mut ys, &mut ws, k as f64 * h, (k + 1) as f64 * h, nodes);
    }
    let p = 2.0 * order.value() + 1.0;
    Ok(ys
        .iter()
        .zip(&ws)
        .map(|(&y, &w)| w * y.powf(p) * f(y) * hankel_kernel(order, xi, y))
        .sum())
}

/// Closed-form transform of `(1 - y^2)^k` on `(0, 1)`:
/// `2^k k! xi^{-nu-k-1} J_{nu+k+1}(xi)`.
pub fn sonine_transform(order: Order, k: u32, xi: f64) -> Result<f64> {
    check_xi(xi)?;
    let nu = order.value();
    let kf = k as f64;
    let mu = nu + kf + 1.0;
    let scale = (kf * std::f64::consts::LN_2 + ln_gamma(kf + 1.0)).exp();
    if xi < 1.0 {
        // avoid the xi^{-mu} J_mu cancellation at small frequency
        return Ok(HANKEL_CONSTANT * scale * j_reduced_unchecked(mu, xi));
    }
    Ok(HANKEL_CONSTANT * scale * xi.powf(-mu) * j_unchecked(mu, xi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{make_quadrature, Domain};
    use crate::quadrature::integrate_panels;
    use std::sync::Arc;

    fn ord(nu: f64) -> Order {
        Order::new(nu).unwrap()
    }

    #[test]
    fn sonine_matches_quadrature() {
        for &nu in &[0.0, 0.5, 1.5, -0.3] {
            let o = ord(nu);
            let g = Arc::new(make_quadrature(Domain::HalfLine { radius: 8.0 }, 2048, MeasureTag::Mu, o).unwrap());
            let f = SampledFunction::from_fn(g, |y| if y < 1.0 { (1.0 - y * y).powi(2) } else { 0.0 });
            for &xi in &[0.3, 1.0, 4.0, 17.0] {
                let q = hankel_transform(&f, xi).unwrap();
                let e = sonine_transform(o, 2, xi).unwrap();
                assert!((q - e).abs() < 1e-6, "nu={nu} xi={xi} {q} {e}");
            }
        }
    }

    #[test]
    fn plancherel_for_polynomial_bump() {
        for &nu in &[0.0, 1.0, 2.5] {
            let o = ord(nu);
            let p = 2.0 * nu + 1.0;
            let lhs = integrate_panels(&[0.0, 0.5, 1.0], 40, |y| (1.0 - y * y).powi(6) * y.powf(p));
            let br: Vec<f64> = (0..=400).map(|i| i as f64).collect();
            let rhs = integrate_panels(&br, 16, |xi| {
                if xi == 0.0 {
                    return 0.0;
                }
                sonine_transform(o, 3, xi).unwrap().powi(2) * xi.powf(p)
            });
            assert!((lhs - rhs).abs() < 1e-6 * lhs, "nu={nu} {lhs} {rhs}");
        }
    }

    #[test]
    fn involution_returns_the_input() {
        let o = ord(0.5);
        let br: Vec<f64> = (0..=600).map(|i| i as f64).collect();
        for &x in &[0.1, 0.4, 0.75] {
            let v = integrate_panels(&br, 16, |xi| sonine_transform(o, 2, xi).unwrap() * hankel_kernel(o, x, xi) * xi * xi);
            let e = (1.0f64 - x * x).powi(2);
            assert!((v - e).abs() < 1e-4, "x={x} {v} {e}");
        }
    }

    #[test]
    fn zero_function_and_bad_frequency() {
        let o = ord(0.0);
        let g = Arc::new(make_quadrature(Domain::HalfLine { radius: 8.0 }, 64, MeasureTag::Mu, o).unwrap());
        let f = SampledFunction::zeros(g);
        assert_eq!(hankel_transform(&f, 2.0).unwrap(), 0.0);
        assert!(hankel_transform(&f, 0.0).is_err());
        assert!(hankel_transform_fn(o, |_| 1.0, 1.0, -1.0, 8).is_err());
    }

    #[test]
    fn closure_variant_agrees() {
        let o = ord(1.0);
        let v = hankel_transform_fn(o, |y| if y < 1.0 { 1.0 - y * y } else { 0.0 }, 1.0, 5.0, 32).unwrap();
        assert!((v - sonine_transform(o, 1, 5.0).unwrap()).abs() < 1e-12);
    }
}
