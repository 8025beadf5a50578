//! Eigenfunction series for the Poisson and heat kernels on `(0, 1)` with
//! certified truncation.

use serde::{Deserialize, Serialize};

use crate::basis::EigenBasis;
use crate::error::{Error, Result};

/// Absolute tolerance on the discarded tail.
pub const SERIES_TOLERANCE: f64 = 1e-10;
/// Hard cap on the number of summed modes.
pub const TERM_CAP: usize = 5000;
/// Zeros beyond the truncation point are assumed at least `pi (1 - slack)` apart.
pub const SPACING_SLACK: f64 = 0.1;

/// A truncated kernel value together with its certified tail bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelEval {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub value: f64,
    pub truncation_terms: usize,
    pub tail_bound: f64,
}

/// Time weight applied to mode `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decay {
    /// `e^{-t lambda}`
    Poisson,
    /// `e^{-t lambda^2}`
    Heat,
}

impl Decay {
    pub fn weight(self, t: f64, lambda: f64) -> f64 {
        match self {
            Decay::Poisson => (-t * lambda).exp(),
            Decay::Heat => (-t * lambda * lambda).exp(),
        }
    }
}

fn gap() -> f64 {
    std::f64::consts::PI * (1.0 - SPACING_SLACK)
}

/// Bound for `sum_{n > N} w(lambda_n) lambda_n^p` (`p` in {0, 1}) given `lambda_N`.
pub fn tail_sum(decay: Decay, t: f64, lambda_n: f64, with_lambda: bool) -> f64 {
    let d = gap();
    match decay {
        Decay::Poisson => {
            let q = (-t * d).exp();
            let base = (-t * lambda_n).exp();
            let one = q / (1.0 - q);
            if with_lambda {
                if lambda_n * t < 1.0 {
                    return f64::INFINITY;
                }
                base * (lambda_n * one + d * q / ((1.0 - q) * (1.0 - q)))
            } else {
                base * one
            }
        }
        Decay::Heat => {
            let r = (-2.0 * t * lambda_n * d).exp();
            let base = (-t * lambda_n * lambda_n).exp();
            if with_lambda {
                // lambda e^{-t lambda^2} is decreasing once lambda^2 > 1/(2t)
                if 2.0 * t * lambda_n * lambda_n < 1.0 {
                    return f64::INFINITY;
                }
                base * (lambda_n * r / (1.0 - r) + d * r / ((1.0 - r) * (1.0 - r)))
            } else {
                base * r / (1.0 - r)
            }
        }
    }
}

/// Smallest `N <= min(len, cap)` whose tail, scaled by `envelope`, is below `tol`.
pub fn terms_for(
    basis: &EigenBasis,
    decay: Decay,
    t: f64,
    envelope: f64,
    with_lambda: bool,
    tol: f64,
    cap: usize,
    op: &'static str,
) -> Result<(usize, f64)> {
    if basis.min_spacing() < gap() {
        return Err(Error::no_conv(op, "zero spacing below the assumed gap"));
    }
    let limit = basis.len().min(cap);
    let bound = |n: usize| envelope * tail_sum(decay, t, basis.lambda(n), with_lambda);
    if limit == 0 || bound(limit) > tol || !bound(limit).is_finite() {
        return Err(Error::no_conv(
            op,
            format!(
                "tail bound {:e} above {tol:e} with {limit} terms at t={t}; enlarge the zero table",
                bound(limit.max(1))
            ),
        ));
    }
    let (mut lo, mut hi) = (1usize, limit);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if bound(mid) <= tol {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok((lo, bound(lo)))
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("time must be positive, got {t}")));
    }
    Ok(())
}

fn check_point(x: f64) -> Result<()> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::invalid(format!("point {x} outside (0, 1]")));
    }
    Ok(())
}

/// Kernel evaluator over a basis with a chosen tolerance and term cap.
#[derive(Debug, Clone, Copy)]
pub struct SeriesKernels<'a> {
    basis: &'a EigenBasis,
    tolerance: f64,
    cap: usize,
}

impl<'a> SeriesKernels<'a> {
    pub fn new(basis: &'a EigenBasis) -> Self {
        SeriesKernels {
            basis,
            tolerance: SERIES_TOLERANCE,
            cap: TERM_CAP,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn basis(&self) -> &EigenBasis {
        self.basis
    }

    fn half_power(&self, x: f64, y: f64) -> f64 {
        (x * y).powf(self.basis.order().value() + 0.5)
    }

    fn sum(
        &self,
        decay: Decay,
        t: f64,
        x: f64,
        y: f64,
        envelope: f64,
        with_lambda: bool,
        op: &'static str,
        term: impl Fn(usize) -> f64,
    ) -> Result<KernelEval> {
        check_time(t)?;
        check_point(x)?;
        check_point(y)?;
        let (n, tail) = terms_for(self.basis, decay, t, envelope, with_lambda, self.tolerance, self.cap, op)?;
        let value = (1..=n)
            .map(|k| {
                let l = self.basis.lambda(k);
                let w = decay.weight(t, l) * if with_lambda { l } else { 1.0 };
                w * term(k)
            })
            .sum();
        Ok(KernelEval {
            t,
            x,
            y,
            value,
            truncation_terms: n,
            tail_bound: tail,
        })
    }

    /// `sum e^{-t lambda_n} phi_n(x) phi_n(y)`.
    pub fn poisson_kernel_l(&self, t: f64, x: f64, y: f64) -> Result<KernelEval> {
        let k = self.basis.envelope_constant();
        let env = k * k / self.half_power(x, y);
        self.sum(Decay::Poisson, t, x, y, env, false, "poisson_kernel_l", |n| {
            self.basis.phi_unchecked(n, x) * self.basis.phi_unchecked(n, y)
        })
    }

    /// `(xy)^{nu+1/2}` times the previous kernel, summed in the `psi` system.
    pub fn poisson_kernel_lsq(&self, t: f64, x: f64, y: f64) -> Result<KernelEval> {
        let k = self.basis.envelope_constant();
        self.sum(Decay::Poisson, t, x, y, k * k, false, "poisson_kernel_lsq", |n| {
            self.basis.psi_unchecked(n, x) * self.basis.psi_unchecked(n, y)
        })
    }

    /// `sum e^{-t lambda_n^2} phi_n(x) phi_n(y)`.
    pub fn heat_kernel_l(&self, t: f64, x: f64, y: f64) -> Result<KernelEval> {
        let k = self.basis.envelope_constant();
        let env = k * k / self.half_power(x, y);
        self.sum(Decay::Heat, t, x, y, env, false, "heat_kernel_l", |n| {
            self.basis.phi_unchecked(n, x) * self.basis.phi_unchecked(n, y)
        })
    }

    /// The heat kernel extended by zero off `(0, 1)^2`.
    pub fn heat_kernel_tilde(&self, t: f64, x: f64, y: f64) -> Result<f64> {
        check_time(t)?;
        if !(x > 0.0 && y > 0.0) {
            return Err(Error::invalid("points must be positive"));
        }
        if x >= 1.0 || y >= 1.0 {
            return Ok(0.0);
        }
        Ok(self.heat_kernel_l(t, x, y)?.value)
    }

    /// `(-d/dx + (nu+1/2)/x)` applied to the Lebesgue-form Poisson kernel in `x`.
    pub fn delta_l_poisson_kernel(&self, t: f64, x: f64, y: f64) -> Result<KernelEval> {
        let env = self.basis.envelope_constant() * self.basis.shifted_envelope_constant();
        self.sum(Decay::Poisson, t, x, y, env, true, "delta_l_poisson_kernel", |n| {
            self.basis.psi_shifted_unchecked(n, x) * self.basis.psi_unchecked(n, y)
        })
    }

    /// `d/dx` of the measure-form Poisson kernel, `-delta_L P / (xy)^{nu+1/2}`.
    pub fn dx_poisson_kernel_l(&self, t: f64, x: f64, y: f64) -> Result<KernelEval> {
        let mut e = self
            .with_tolerance(self.tolerance * self.half_power(x, y))
            .delta_l_poisson_kernel(t, x, y)?;
        let h = self.half_power(x, y);
        if h == 0.0 {
            return Err(Error::invalid("points too close to the origin"));
        }
        e.value /= -h;
        e.tail_bound /= h;
        Ok(e)
    }

    /// `d/dy` of the Lebesgue-form Poisson kernel, via symmetry and the first-order factor.
    pub fn dy_poisson_kernel_lsq(&self, t: f64, x: f64, y: f64) -> Result<f64> {
        let p = self.poisson_kernel_lsq(t, x, y)?.value;
        let d = self.delta_l_poisson_kernel(t, y, x)?.value;
        Ok((self.basis.order().value() + 0.5) / y * p - d)
    }
}

/// `sum e^{-t lambda_n} phi_n(x) phi_n(y)` at default tolerance.
pub fn poisson_kernel_l(basis: &EigenBasis, t: f64, x: f64, y: f64) -> Result<KernelEval> {
    SeriesKernels::new(basis).poisson_kernel_l(t, x, y)
}

pub fn poisson_kernel_lsq(basis: &EigenBasis, t: f64, x: f64, y: f64) -> Result<KernelEval> {
    SeriesKernels::new(basis).poisson_kernel_lsq(t, x, y)
}

pub fn heat_kernel_l(basis: &EigenBasis, t: f64, x: f64, y: f64) -> Result<KernelEval> {
    SeriesKernels::new(basis).heat_kernel_l(t, x, y)
}

pub fn heat_kernel_tilde(basis: &EigenBasis, t: f64, x: f64, y: f64) -> Result<f64> {
    SeriesKernels::new(basis).heat_kernel_tilde(t, x, y)
}

pub fn delta_l_poisson_kernel(basis: &EigenBasis, t: f64, x: f64, y: f64) -> Result<KernelEval> {
    SeriesKernels::new(basis).delta_l_poisson_kernel(t, x, y)
}

pub fn dx_poisson_kernel_l(basis: &EigenBasis, t: f64, x: f64, y: f64) -> Result<KernelEval> {
    SeriesKernels::new(basis).dx_poisson_kernel_l(t, x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::Order;
    use std::f64::consts::PI;

    fn basis(nu: f64, n: usize) -> EigenBasis {
        EigenBasis::new(Order::new(nu).unwrap(), n).unwrap()
    }

    #[test]
    fn half_order_sine_series() {
        let b = basis(0.5, 2000);
        for &(t, x, y) in &[(0.3, 0.2, 0.7), (0.05, 0.5, 0.5), (1.0, 0.9, 0.1)] {
            let mut e = 0.0;
            for n in 1..4000 {
                let k = n as f64 * PI;
                e += 2.0 * (-k * t).exp() * (k * x).sin() * (k * y).sin();
            }
            let v = poisson_kernel_l(&b, t, x, y).unwrap();
            assert!((v.value * x * y - e).abs() < 1e-10, "{t} {x} {y}");
            let w = poisson_kernel_lsq(&b, t, x, y).unwrap();
            assert!((w.value - e).abs() < 1e-10);
        }
    }

    #[test]
    fn closed_geometric_value() {
        let b = basis(0.5, 200);
        let v = poisson_kernel_lsq(&b, 1.0, 0.5, 0.5).unwrap();
        let e = 2.0 * (-PI).exp() / (1.0 - (-2.0 * PI).exp());
        assert!((v.value - e).abs() < 1e-10);
        assert!(v.tail_bound < SERIES_TOLERANCE);
    }

    #[test]
    fn brute_force_order_zero() {
        let b = basis(0.0, 400);
        let v = poisson_kernel_l(&b, 0.5, 0.5, 0.5).unwrap();
        let brute: f64 = (1..=200)
            .map(|n| (-0.5 * b.lambda(n)).exp() * b.phi(n, 0.5).unwrap().powi(2))
            .sum();
        assert!((v.value - brute).abs() < 1e-10);
    }

    #[test]
    fn symmetric_in_points() {
        let b = basis(1.3, 1000);
        let s = SeriesKernels::new(&b);
        for &(t, x, y) in &[(0.1, 0.3, 0.8), (0.02, 0.55, 0.6)] {
            assert_eq!(s.poisson_kernel_l(t, x, y).unwrap().value, s.poisson_kernel_l(t, y, x).unwrap().value);
            assert_eq!(s.heat_kernel_l(t, x, y).unwrap().value, s.heat_kernel_l(t, y, x).unwrap().value);
        }
    }

    #[test]
    fn delta_matches_finite_difference() {
        for &nu in &[0.0, 0.5, 2.0] {
            let b = basis(nu, 2000);
            let s = SeriesKernels::new(&b);
            let (t, y) = (0.2, 0.45);
            for &x in &[0.2, 0.5, 0.8] {
                let h = 1e-5;
                let p = |x: f64| s.poisson_kernel_lsq(t, x, y).unwrap().value;
                let fd = -(p(x + h) - p(x - h)) / (2.0 * h) + (nu + 0.5) / x * p(x);
                let d = s.delta_l_poisson_kernel(t, x, y).unwrap().value;
                assert!((d - fd).abs() < 1e-5, "nu={nu} x={x} {d} {fd}");
                let q = |x: f64| s.poisson_kernel_l(t, x, y).unwrap().value;
                let fd = (q(x + h) - q(x - h)) / (2.0 * h);
                let dx = s.dx_poisson_kernel_l(t, x, y).unwrap().value;
                assert!((dx - fd).abs() < 1e-5 * fd.abs().max(1.0), "nu={nu} x={x} {dx} {fd}");
            }
        }
    }

    #[test]
    fn half_order_derivative_closed_form() {
        // d/dx of 2 sum e^{-n pi t} sin(n pi x) sin(n pi y), plus the 1/x term.
        let b = basis(0.5, 2000);
        let (t, x, y) = (0.1, 0.3, 0.6);
        let mut p = 0.0;
        let mut dp = 0.0;
        for n in 1..3000 {
            let k = n as f64 * PI;
            p += 2.0 * (-k * t).exp() * (k * x).sin() * (k * y).sin();
            dp += 2.0 * (-k * t).exp() * k * (k * x).cos() * (k * y).sin();
        }
        let d = delta_l_poisson_kernel(&b, t, x, y).unwrap().value;
        assert!((d - (-dp + p / x)).abs() < 1e-9);
    }

    #[test]
    fn heat_eigen_identity_and_tilde() {
        let b = basis(1.0, 500);
        let s = SeriesKernels::new(&b);
        let grid = crate::basis::make_quadrature(
            crate::basis::Domain::UnitInterval,
            512,
            crate::basis::MeasureTag::Mu,
            b.order(),
        )
        .unwrap();
        let (t, x) = (0.01, 0.4);
        let v = grid.integrate(|y| s.heat_kernel_l(t, x, y).unwrap().value * b.phi(1, y).unwrap());
        let e = (-t * b.lambda(1).powi(2)).exp() * b.phi(1, x).unwrap();
        assert!((v - e).abs() < 1e-8);
        assert_eq!(s.heat_kernel_tilde(t, 1.2, 0.5).unwrap(), 0.0);
        assert_eq!(s.heat_kernel_tilde(t, 0.3, 0.5).unwrap(), s.heat_kernel_l(t, 0.3, 0.5).unwrap().value);
    }

    #[test]
    fn rejects_bad_input_and_small_tables() {
        let b = basis(0.0, 20);
        assert!(poisson_kernel_l(&b, 0.0, 0.5, 0.5).is_err());
        assert!(poisson_kernel_l(&b, 0.1, 1.5, 0.5).is_err());
        let e = poisson_kernel_l(&b, 1e-3, 0.5, 0.5).unwrap_err();
        assert_eq!(e.operation(), Some("poisson_kernel_l"));
    }

    #[test]
    fn tail_bound_dominates_true_tail() {
        let b = basis(2.5, 3000);
        let s = SeriesKernels::new(&b).with_tolerance(1e-6);
        let (t, x, y) = (0.05, 0.3, 0.31);
        let short = s.poisson_kernel_l(t, x, y).unwrap();
        let long = s.with_tolerance(1e-14).poisson_kernel_l(t, x, y).unwrap();
        assert!((short.value - long.value).abs() <= short.tail_bound);
    }
}
