//! Piecewise-constant functions with closed-form expansion coefficients.

use serde::{Deserialize, Serialize};

use super::{EigenBasis, MeasureMu};
use crate::error::{Error, Result};
use crate::specfun::{j_unchecked, Order, SqrtBesselIntegral};

/// `heights[k]` on `(breaks[k], breaks[k+1]]`, zero elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    breaks: Vec<f64>,
    heights: Vec<f64>,
}

impl StepFunction {
    pub fn new(breaks: Vec<f64>, heights: Vec<f64>) -> Result<Self> {
        if breaks.len() != heights.len() + 1 || heights.is_empty() {
            return Err(Error::invalid("need one more breakpoint than heights"));
        }
        if breaks[0] < 0.0 || breaks.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("breakpoints must be nonnegative and strictly increasing"));
        }
        if heights.iter().chain(&breaks).any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite step data"));
        }
        Ok(StepFunction { breaks, heights })
    }

    /// `height` times the indicator of `(a, b]`.
    pub fn indicator(a: f64, b: f64, height: f64) -> Result<Self> {
        Self::new(vec![a, b], vec![height])
    }

    pub fn zero() -> Self {
        StepFunction {
            breaks: vec![0.0, 1.0],
            heights: vec![0.0],
        }
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn support(&self) -> (f64, f64) {
        (self.breaks[0], self.breaks[self.breaks.len() - 1])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (a, b) = self.support();
        if x <= a || x > b {
            return 0.0;
        }
        let k = self.breaks.partition_point(|&p| p < x);
        self.heights[k - 1]
    }

    pub fn scaled(&self, c: f64) -> Self {
        StepFunction {
            breaks: self.breaks.clone(),
            heights: self.heights.iter().map(|h| h * c).collect(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.heights.iter().fold(0.0, |m, h| m.max(h.abs()))
    }

    pub fn integral_mu(&self, order: Order) -> f64 {
        let m = MeasureMu::new(order);
        self.pieces().map(|(a, b, h)| h * m.interval(a, b)).sum()
    }

    pub fn l1_mu(&self, order: Order) -> f64 {
        let m = MeasureMu::new(order);
        self.pieces().map(|(a, b, h)| h.abs() * m.interval(a, b)).sum()
    }

    pub fn integral_lebesgue(&self) -> f64 {
        self.pieces().map(|(a, b, h)| h * (b - a)).sum()
    }

    pub fn l1_lebesgue(&self) -> f64 {
        self.pieces().map(|(a, b, h)| h.abs() * (b - a)).sum()
    }

    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breaks
            .windows(2)
            .zip(&self.heights)
            .map(|(w, &h)| (w[0], w[1], h))
    }

    /// Jumps `h_{i-1} - h_i` at each breakpoint clipped to `[0, 1]`, merged.
    fn jumps_on_unit(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(self.breaks.len());
        for (i, &b) in self.breaks.iter().enumerate() {
            let left = if i == 0 { 0.0 } else { self.heights[i - 1] };
            let right = self.heights.get(i).copied().unwrap_or(0.0);
            let bc = b.min(1.0);
            let d = left - right;
            match out.last_mut() {
                Some(last) if last.0 == bc => last.1 += d,
                _ => out.push((bc, d)),
            }
        }
        out.retain(|&(b, d)| d != 0.0 && b > 0.0);
        out
    }

    /// `<f, phi_n>_mu` for `n = 1..=count`, exact up to Bessel evaluation.
    pub fn coeffs_phi(&self, basis: &EigenBasis, count: usize) -> Result<Vec<f64>> {
        check_count(basis, count)?;
        let nu = basis.order().value();
        let jumps = self.jumps_on_unit();
        Ok((1..=count)
            .map(|n| {
                let l = basis.lambda(n);
                let s: f64 = jumps
                    .iter()
                    .map(|&(b, d)| d * b.powf(nu + 1.0) * j_unchecked(nu + 1.0, l * b))
                    .sum();
                basis.norm_constant(n) / l * s
            })
            .collect())
    }

    /// `<g, psi_n>` in `L^2(0, 1)` for `n = 1..=count`.
    pub fn coeffs_psi(&self, basis: &EigenBasis, count: usize, g: &SqrtBesselIntegral) -> Result<Vec<f64>> {
        check_count(basis, count)?;
        let jumps = self.jumps_on_unit();
        Ok((1..=count)
            .map(|n| {
                let l = basis.lambda(n);
                let s: f64 = jumps.iter().map(|&(b, d)| d * g.eval(l * b)).sum();
                basis.norm_constant(n) * l.powf(-1.5) * s
            })
            .collect())
    }
}

fn check_count(basis: &EigenBasis, count: usize) -> Result<()> {
    if count > basis.len() {
        return Err(Error::IndexOutOfRange {
            index: count,
            len: basis.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_panels;
    use std::f64::consts::PI;

    fn ord(nu: f64) -> Order {
        Order::new(nu).unwrap()
    }

    #[test]
    fn evaluation_is_right_closed() {
        let s = StepFunction::new(vec![0.2, 0.5, 0.7], vec![1.0, -2.0]).unwrap();
        assert_eq!(s.eval(0.2), 0.0);
        assert_eq!(s.eval(0.5), 1.0);
        assert_eq!(s.eval(0.51), -2.0);
        assert_eq!(s.eval(0.7), -2.0);
        assert_eq!(s.eval(0.71), 0.0);
        assert!(StepFunction::new(vec![0.3, 0.2], vec![1.0]).is_err());
    }

    #[test]
    fn phi_coefficients_match_quadrature() {
        for &nu in &[0.0, 0.5, 2.5, -0.3] {
            let o = ord(nu);
            let b = EigenBasis::new(o, 30).unwrap();
            let s = StepFunction::new(vec![0.1, 0.35, 0.8], vec![2.0, -0.5]).unwrap();
            let c = s.coeffs_phi(&b, 30).unwrap();
            for n in [1, 7, 30] {
                let br: Vec<f64> = (0..=70).map(|i| 0.1 + 0.7 * i as f64 / 70.0).collect();
                let q = integrate_panels(&br, 30, |x| s.eval(x) * b.phi(n, x).unwrap() * x.powf(2.0 * nu + 1.0));
                assert!((c[n - 1] - q).abs() < 1e-9, "nu={nu} n={n} {} {q}", c[n - 1]);
            }
        }
    }

    #[test]
    fn psi_coefficients_half_order_closed_form() {
        // int_a^b sqrt2 sin(n pi y) dy
        let o = ord(0.5);
        let b = EigenBasis::new(o, 40).unwrap();
        let g = SqrtBesselIntegral::new(o);
        let s = StepFunction::indicator(0.25, 0.6, 3.0).unwrap();
        let c = s.coeffs_psi(&b, 40, &g).unwrap();
        for n in 1..=40 {
            let k = n as f64 * PI;
            let e = 3.0 * 2f64.sqrt() * ((k * 0.25).cos() - (k * 0.6).cos()) / k;
            assert!((c[n - 1] - e).abs() < 1e-11, "n={n}");
        }
    }

    #[test]
    fn mass_and_norms() {
        let s = StepFunction::new(vec![0.0, 0.5, 1.0], vec![1.0, -1.0]).unwrap();
        assert!((s.integral_mu(ord(0.5)) - (1.0 / 24.0 - 7.0 / 24.0)).abs() < 1e-15);
        assert!((s.l1_mu(ord(0.5)) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.integral_lebesgue(), 0.0);
        assert_eq!(s.sup_norm(), 1.0);
    }

    #[test]
    fn breaks_beyond_unit_are_clipped() {
        let b = EigenBasis::new(ord(1.0), 5).unwrap();
        let s = StepFunction::indicator(0.5, 1.5, 1.0).unwrap();
        let t = StepFunction::indicator(0.5, 1.0, 1.0).unwrap();
        let cs = s.coeffs_phi(&b, 5).unwrap();
        let ct = t.coeffs_phi(&b, 5).unwrap();
        for (x, y) in cs.iter().zip(&ct) {
            assert!((x - y).abs() < 1e-15);
        }
    }
}
