//! Heat and Poisson kernels of the Bessel operator on the half-line.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::gl_rule;
use crate::specfun::{i_reduced_scaled_unchecked, Order};

/// Breakpoints (in units of the scale `sigma`) for the subordination integral in `v = sqrt(u)`.
const V_BREAKS: [f64; 9] = [0.0, 0.01, 0.05, 0.2, 0.5, 1.0, 2.0, 4.0, 8.0];
const V_NODES: usize = 64;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::invalid(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(Error::invalid(format!("{name} must be nonnegative and finite, got {v}")));
    }
    Ok(())
}

/// `(2t)^{-nu-1} e^{-(x-y)^2/4t} [e^{-w} w^{-nu} I_nu(w)]`, `w = xy/2t`, as a log-magnitude.
pub(crate) fn heat_log(nu: f64, t: f64, x: f64, y: f64) -> f64 {
    let w = x * y / (2.0 * t);
    let g = i_reduced_scaled_unchecked(nu, w);
    -(nu + 1.0) * (2.0 * t).ln() - (x - y) * (x - y) / (4.0 * t) + g.ln()
}

pub(crate) fn heat_unchecked(nu: f64, t: f64, x: f64, y: f64) -> f64 {
    heat_log(nu, t, x, y).exp()
}

/// `(2t)^{-1} e^{-(x^2+y^2)/4t} I_nu(xy/2t) (xy)^{-nu}`, evaluated in exponentially scaled form.
pub fn heat_kernel_halfline(order: Order, t: f64, x: f64, y: f64) -> Result<f64> {
    check_positive("time", t)?;
    check_nonneg("x", x)?;
    check_nonneg("y", y)?;
    let l = heat_log(order.value(), t, x, y);
    if l > 709.0 {
        return Err(Error::Overflow("heat_kernel_halfline"));
    }
    Ok(l.exp())
}

/// `(log|d/dz T|, sign)`, so that tiny values far off the diagonal stay representable.
pub(crate) fn dz_heat_log(nu: f64, t: f64, x: f64, z: f64) -> (f64, f64) {
    let w = x * z / (2.0 * t);
    let pre = -(nu + 1.0) * (2.0 * t).ln() - (x - z) * (x - z) / (4.0 * t);
    let g0 = i_reduced_scaled_unchecked(nu, w);
    let g1 = i_reduced_scaled_unchecked(nu + 1.0, w);
    let bracket = -z / (2.0 * t) * g0 + x / (2.0 * t) * w * g1;
    (pre + bracket.abs().ln(), bracket.signum())
}

pub(crate) fn dz_heat_unchecked(nu: f64, t: f64, x: f64, z: f64) -> f64 {
    let (l, s) = dz_heat_log(nu, t, x, z);
    s * l.exp()
}

/// Derivative of the half-line heat kernel in its second argument, in closed form.
pub fn dz_heat_kernel_halfline(order: Order, t: f64, x: f64, z: f64) -> Result<f64> {
    check_positive("time", t)?;
    check_nonneg("x", x)?;
    check_nonneg("z", z)?;
    let v = dz_heat_unchecked(order.value(), t, x, z);
    if !v.is_finite() {
        return Err(Error::Overflow("dz_heat_kernel_halfline"));
    }
    Ok(v)
}

/// Subordinated Poisson kernel
/// `pi^{-1/2} int_0^inf e^{-u} u^{-1/2} T_{t^2/4u}(x, y) du`, computed as
/// `2 pi^{-1/2} int_0^inf e^{-v^2} T_{t^2/4v^2} dv` on panels scaled to the Gaussian width.
pub fn poisson_kernel_halfline(order: Order, t: f64, x: f64, y: f64) -> Result<f64> {
    check_positive("time", t)?;
    check_nonneg("x", x)?;
    check_nonneg("y", y)?;
    let nu = order.value();
    let d = (x - y) / t;
    let sigma = 1.0 / (1.0 + d * d).sqrt();
    let rule = gl_rule(V_NODES);
    let mut sum = 0.0;
    for w in V_BREAKS.windows(2) {
        let (a, b) = (w[0] * sigma, w[1] * sigma);
        let h = 0.5 * (b - a);
        let m = 0.5 * (a + b);
        let mut s = 0.0;
        for &(z, wt) in rule.iter() {
            let v = m + h * z;
            let s_time = t * t / (4.0 * v * v);
            s += wt * (heat_log(nu, s_time, x, y) - v * v).exp();
        }
        sum += h * s;
    }
    let v = 2.0 / PI.sqrt() * sum;
    if !v.is_finite() {
        return Err(Error::no_conv("poisson_kernel_halfline", format!("non-finite value at t={t} x={x} y={y}")));
    }
    Ok(v)
}

/// Closed forms at `nu = 1/2`, used as references.
pub fn half_order_heat(t: f64, x: f64, y: f64) -> f64 {
    let a = (-(x - y) * (x - y) / (4.0 * t)).exp();
    let b = (-(x + y) * (x + y) / (4.0 * t)).exp();
    (a - b) / (x * y * (4.0 * PI * t).sqrt())
}

pub fn half_order_poisson(t: f64, x: f64, y: f64) -> f64 {
    let a = t / (t * t + (x - y) * (x - y));
    let b = t / (t * t + (x + y) * (x + y));
    (a - b) / (PI * x * y)
}
