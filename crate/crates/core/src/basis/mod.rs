//! The measure `x^{2nu+1} dx`, orthonormal Fourier-Bessel systems, sampled and
//! piecewise-constant functions, and the Hankel transform.

mod hankel;
mod sampled;
mod step;

pub use hankel::{hankel_kernel, hankel_transform, hankel_transform_fn, sonine_transform};
pub use sampled::{make_quadrature, read_xy_csv, Domain, MeasureTag, QuadGrid, SampledFunction};
pub use step::StepFunction;

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{graded_breaks, push_panel};
use crate::specfun::{cached_zeros, j_reduced_unchecked, j_unchecked, BesselZeroTable, Order};

/// The measure `dmu = x^{2nu+1} dx` on the half-line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureMu {
    order: Order,
}

impl MeasureMu {
    pub fn new(order: Order) -> Self {
        MeasureMu { order }
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn density(&self, x: f64) -> f64 {
        x.powf(2.0 * self.order.value() + 1.0)
    }

    /// `mu((a, b))` in closed form, for `0 <= a <= b`.
    pub fn interval(&self, a: f64, b: f64) -> f64 {
        let p = self.order.mu_exponent();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (lo, hi) = (lo.max(0.0), hi.max(0.0));
        if lo == 0.0 {
            return hi.powf(p) / p;
        }
        // stable for short intervals far from the origin
        lo.powf(p) * (p * ((hi - lo) / lo).ln_1p()).exp_m1() / p
    }

    /// `mu(B(x, r))` on `(0, inf)`.
    pub fn ball(&self, x: f64, r: f64) -> f64 {
        self.interval((x - r).max(0.0), x + r)
    }

    /// The two-regime comparison profile for `mu(B(x, r))`.
    pub fn ball_profile(&self, x: f64, r: f64) -> f64 {
        let nu = self.order.value();
        if r <= 2.0 * x {
            x.powf(2.0 * nu + 1.0) * r
        } else {
            r.powf(2.0 * nu + 2.0)
        }
    }
}

/// `d_mu(x, y) = |mu((x, y))|`.
pub fn mu_distance(order: Order, x: f64, y: f64) -> f64 {
    MeasureMu::new(order).interval(x.min(y), x.max(y))
}

/// Nodes and weights for `int_a^b g(x) x^{2nu+1} dx` with grading toward the origin
/// when the density is not smooth there.
pub fn mu_rule(order: Order, a: f64, b: f64, panel_width: f64, nodes: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    let breaks = if a <= 0.0 {
        graded_breaks(0.0, b, 1e-10 * b.max(1e-300), 4.0, panel_width)
    } else {
        graded_breaks(a, b, panel_width, 1.0, panel_width)
    };
    for w in breaks.windows(2) {
        push_panel(&mut xs, &mut ws, w[0], w[1], nodes);
    }
    let p = 2.0 * order.value() + 1.0;
    for (x, w) in xs.iter().zip(ws.iter_mut()) {
        *w *= x.powf(p);
    }
    (xs, ws)
}

/// Upper bound for `sup_{z>0} sqrt(z) |J_mu(z)|`: a fine scan plus the large-argument
/// envelope, padded by one percent.
fn sqrt_j_sup(mu: f64) -> f64 {
    let end = 60.0f64.max(4.0 * mu + 40.0);
    let mut best: f64 = 0.0;
    let mut z = 0.025;
    while z < end {
        best = best.max(z.sqrt() * j_unchecked(mu, z).abs());
        z += 0.025;
    }
    let far = (2.0 / PI).sqrt() * (1.0 + (4.0 * mu * mu - 1.0).abs() / (4.0 * end));
    best.max(far) * 1.01
}

/// Which orthonormal system a coefficient vector refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum System {
    /// `phi_n`, orthonormal in `L^2((0,1), mu)`.
    Phi,
    /// `psi_n = x^{nu+1/2} phi_n`, orthonormal in `L^2(0,1)`.
    Psi,
}

/// Orthonormal eigenfunctions of the Bessel operator on `(0, 1)`.
///
/// `phi_n(x) = c_n J_nu(lambda_n x) x^{-nu}` with `c_n = sqrt(2) / |J_{nu+1}(lambda_n)|`.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    order: Order,
    zeros: Arc<BesselZeroTable>,
    size: usize,
    norms: Vec<f64>,
    amplitude: f64,
    sqrt_j_sup: [f64; 2],
}

impl EigenBasis {
    /// Basis with the first `size` eigenfunctions; unit norms are checked by
    /// quadrature on the leading modes.
    pub fn new(order: Order, size: usize) -> Result<Self> {
        let zeros = cached_zeros(order, size)?;
        let nu = order.value();
        let norms: Vec<f64> = zeros.zeros()[..size]
            .iter()
            .map(|&l| 2f64.sqrt() / j_unchecked(nu + 1.0, l).abs())
            .collect();
        let amplitude = zeros.zeros()[..size]
            .iter()
            .zip(&norms)
            .fold(PI.sqrt(), |m, (l, c)| m.max(c / l.sqrt()))
            * 1.01;
        let basis = EigenBasis {
            order,
            zeros,
            size,
            norms,
            amplitude,
            sqrt_j_sup: [sqrt_j_sup(nu), sqrt_j_sup(nu + 1.0)],
        };
        let (xs, ws) = mu_rule(order, 0.0, 1.0, 1.0 / 16.0, 32);
        for n in 1..=size.min(8) {
            let s: f64 = xs
                .iter()
                .zip(&ws)
                .map(|(&x, &w)| w * basis.phi_unchecked(n, x).powi(2))
                .sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(Error::no_conv(
                    "eigen_basis",
                    format!("mode {n} has squared norm {s}, expected 1"),
                ));
            }
        }
        Ok(basis)
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn zeros(&self) -> &[f64] {
        &self.zeros.zeros()[..self.size]
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    /// `lambda_n`, 1-based.
    pub fn lambda(&self, n: usize) -> f64 {
        self.zeros.zeros()[n - 1]
    }

    pub fn norm_constant(&self, n: usize) -> f64 {
        self.norms[n - 1]
    }

    fn check(&self, n: usize, x: f64) -> Result<()> {
        if n == 0 || n > self.size {
            return Err(Error::IndexOutOfRange {
                index: n,
                len: self.size,
            });
        }
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::invalid(format!("point {x} outside [0, 1]")));
        }
        Ok(())
    }

    pub fn phi(&self, n: usize, x: f64) -> Result<f64> {
        self.check(n, x)?;
        Ok(self.phi_unchecked(n, x))
    }

    pub fn psi(&self, n: usize, x: f64) -> Result<f64> {
        self.check(n, x)?;
        Ok(self.psi_unchecked(n, x))
    }

    pub(crate) fn phi_unchecked(&self, n: usize, x: f64) -> f64 {
        let nu = self.order.value();
        let l = self.lambda(n);
        let z = l * x;
        self.norms[n - 1] * l.powf(nu) * j_reduced_unchecked(nu, z)
    }

    pub(crate) fn psi_unchecked(&self, n: usize, x: f64) -> f64 {
        let nu = self.order.value();
        let l = self.lambda(n);
        self.norms[n - 1] * x.sqrt() * j_unchecked(nu, l * x)
    }

    /// `c_n sqrt(x) J_{nu+1}(lambda_n x)`, the image of `psi_n` under the first-order factor.
    pub(crate) fn psi_shifted_unchecked(&self, n: usize, x: f64) -> f64 {
        let nu = self.order.value();
        let l = self.lambda(n);
        self.norms[n - 1] * x.sqrt() * j_unchecked(nu + 1.0, l * x)
    }

    /// Smallest gap between consecutive tabulated zeros.
    pub fn min_spacing(&self) -> f64 {
        self.zeros()
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn eval_unchecked(&self, sys: System, n: usize, x: f64) -> f64 {
        match sys {
            System::Phi => self.phi_unchecked(n, x),
            System::Psi => self.psi_unchecked(n, x),
        }
    }

    /// `sum_n coeffs[n-1] e_n(x)` in the chosen system.
    pub fn synthesize(&self, coeffs: &[f64], x: f64, sys: System) -> Result<f64> {
        if coeffs.len() > self.size {
            return Err(Error::IndexOutOfRange {
                index: coeffs.len(),
                len: self.size,
            });
        }
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::invalid(format!("point {x} outside [0, 1]")));
        }
        Ok(coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(i, c)| c * self.eval_unchecked(sys, i + 1, x))
            .sum())
    }

    /// `<f, phi_n>_mu` by the quadrature carried by `f`.
    pub fn coeff_mu(&self, f: &SampledFunction, n: usize) -> Result<f64> {
        f.expect_tag(MeasureTag::Mu)?;
        self.check(n, 0.5)?;
        Ok(f.nodes()
            .iter()
            .zip(f.values())
            .zip(f.weights())
            .map(|((&x, &v), &w)| w * v * self.phi_unchecked(n, x))
            .sum())
    }

    /// `<g, psi_n>` in `L^2(0, 1)`.
    pub fn coeff_lebesgue(&self, g: &SampledFunction, n: usize) -> Result<f64> {
        g.expect_tag(MeasureTag::Lebesgue)?;
        self.check(n, 0.5)?;
        Ok(g.nodes()
            .iter()
            .zip(g.values())
            .zip(g.weights())
            .map(|((&x, &v), &w)| w * v * self.psi_unchecked(n, x))
            .sum())
    }

    /// Uniform bound `K` with `|psi_n(x)| <= K`, hence `|phi_n(x)| <= K x^{-nu-1/2}`.
    /// Also valid for modes beyond the table.
    pub fn envelope_constant(&self) -> f64 {
        self.amplitude * self.sqrt_j_sup[0]
    }

    /// Bound on `|c_n sqrt(x) J_{nu+1}(lambda_n x)|`.
    pub fn shifted_envelope_constant(&self) -> f64 {
        self.amplitude * self.sqrt_j_sup[1]
    }
}

/// Matrix of mode values `e_n(x_i)`, stored point-major.
#[derive(Debug, Clone)]
pub struct ModeTable {
    pub points: Vec<f64>,
    pub modes: usize,
    values: Vec<f64>,
}

impl ModeTable {
    pub fn new(basis: &EigenBasis, points: &[f64], modes: usize, sys: System) -> Self {
        Self::from_fn(basis, points, modes, |n, x| basis.eval_unchecked(sys, n, x))
    }

    pub(crate) fn from_fn(basis: &EigenBasis, points: &[f64], modes: usize, f: impl Fn(usize, f64) -> f64) -> Self {
        let modes = modes.min(basis.len());
        let mut values = Vec::with_capacity(points.len() * modes);
        for &x in points {
            for n in 1..=modes {
                values.push(f(n, x));
            }
        }
        ModeTable {
            points: points.to_vec(),
            modes,
            values,
        }
    }

    /// Mode values at point `i`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.modes..(i + 1) * self.modes]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ord(nu: f64) -> Order {
        Order::new(nu).unwrap()
    }

    #[test]
    fn measure_closed_forms() {
        let m = MeasureMu::new(ord(0.5));
        assert!((m.interval(0.0, 1.0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((mu_distance(ord(0.5), 0.25, 0.75) - 13.0 / 96.0).abs() < 1e-15);
        assert!((mu_distance(ord(0.0), 0.0, 1.0) - 0.5).abs() < 1e-15);
        assert_eq!(mu_distance(ord(1.3), 0.4, 0.4), 0.0);
    }

    #[test]
    fn half_order_eigenfunctions_are_sines() {
        let b = EigenBasis::new(ord(0.5), 30).unwrap();
        for n in 1..=30 {
            for i in 1..100 {
                let x = i as f64 / 100.0;
                let e = 2f64.sqrt() * (n as f64 * PI * x).sin();
                assert!((b.psi(n, x).unwrap() - e).abs() < 1e-12);
            }
        }
        assert!((b.phi(1, 0.5).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((b.psi(3, 1.0 / 6.0).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!(b.psi(2, 0.5).unwrap().abs() < 1e-12);
    }

    #[test]
    fn phi_vanishes_at_right_end() {
        for &nu in &[0.0, 1.0, 2.5] {
            let b = EigenBasis::new(ord(nu), 10).unwrap();
            for n in 1..=10 {
                assert!(b.phi(n, 1.0).unwrap().abs() < 1e-10);
            }
        }
    }

    #[test]
    fn psi_is_weighted_phi() {
        let b = EigenBasis::new(ord(0.0), 5).unwrap();
        let x: f64 = 0.3;
        assert!((b.psi(1, x).unwrap() - x.sqrt() * b.phi(1, x).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn index_and_domain_checks() {
        let b = EigenBasis::new(ord(0.0), 5).unwrap();
        assert!(b.phi(0, 0.5).is_err());
        assert!(b.phi(6, 0.5).is_err());
        assert!(b.phi(1, 1.5).is_err());
        assert!(b.synthesize(&[0.0; 6], 0.5, System::Phi).is_err());
        assert_eq!(b.synthesize(&[0.0; 5], 0.5, System::Phi).unwrap(), 0.0);
    }

    #[test]
    fn synthesis_of_unit_vector() {
        let b = EigenBasis::new(ord(1.0), 5).unwrap();
        let v = b.synthesize(&[0.0, 1.0], 0.37, System::Phi).unwrap();
        assert!((v - b.phi(2, 0.37).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn norm_constants_stay_bounded_relative_to_growth() {
        // c_n ~ sqrt(pi lambda_n); the ratio stays O(1).
        let b = EigenBasis::new(ord(2.5), 400).unwrap();
        for n in 1..=400 {
            let r = b.norm_constant(n) / (PI * b.lambda(n)).sqrt();
            assert!(r > 0.5 && r < 2.0, "n={n} r={r}");
        }
    }

    #[test]
    fn ball_profile_two_sided() {
        for &nu in &[0.0, 0.5, 2.5, -0.3] {
            let m = MeasureMu::new(ord(nu));
            let mut lo = f64::INFINITY;
            let mut hi: f64 = 0.0;
            for i in 1..60 {
                for k in 1..60 {
                    let x = 1e-3 * 1.15f64.powi(i);
                    let r = 1e-3 * 1.15f64.powi(k);
                    let q = m.ball(x, r) / m.ball_profile(x, r);
                    lo = lo.min(q);
                    hi = hi.max(q);
                }
            }
            assert!(lo > 0.05 && hi < 3f64.powf(2.0 * nu + 2.0), "nu={nu} [{lo}, {hi}]");
        }
    }

    fn unit_grid(nu: f64, tag: MeasureTag, n: usize) -> Arc<QuadGrid> {
        Arc::new(make_quadrature(Domain::UnitInterval, n, tag, ord(nu)).unwrap())
    }

    #[test]
    fn gram_matrices_are_identity() {
        for &nu in &[0.0, 0.5, 1.0, 2.5] {
            let b = EigenBasis::new(ord(nu), 20).unwrap();
            let gm = unit_grid(nu, MeasureTag::Mu, 512);
            let gl = unit_grid(nu, MeasureTag::Lebesgue, 512);
            for n in 1..=20 {
                let fm = SampledFunction::from_fn(Arc::clone(&gm), |x| b.phi(n, x).unwrap());
                let fl = SampledFunction::from_fn(Arc::clone(&gl), |x| b.psi(n, x).unwrap());
                for m in 1..=20 {
                    let e = if n == m { 1.0 } else { 0.0 };
                    assert!((b.coeff_mu(&fm, m).unwrap() - e).abs() < 1e-8, "nu={nu} {n} {m}");
                    assert!((b.coeff_lebesgue(&fl, m).unwrap() - e).abs() < 1e-8, "nu={nu} {n} {m}");
                }
            }
        }
    }

    #[test]
    fn coefficient_of_identity_function() {
        let b = EigenBasis::new(ord(0.5), 3).unwrap();
        let f = SampledFunction::from_fn(unit_grid(0.5, MeasureTag::Mu, 128), |x| x);
        let e = 2f64.sqrt() * (PI * PI - 4.0) / PI.powi(3);
        assert!((b.coeff_mu(&f, 1).unwrap() - e).abs() < 1e-12);
        let g = SampledFunction::from_fn(unit_grid(0.5, MeasureTag::Lebesgue, 128), |x| 2f64.sqrt() * (PI * x).sin());
        assert!((b.coeff_lebesgue(&g, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!(b.coeff_mu(&g, 1).is_err());
    }

    #[test]
    fn analysis_then_synthesis() {
        let b = EigenBasis::new(ord(0.5), 50).unwrap();
        let g = SampledFunction::from_fn(unit_grid(0.5, MeasureTag::Lebesgue, 256), |x| x * (1.0 - x));
        let c: Vec<f64> = (1..=50).map(|n| b.coeff_lebesgue(&g, n).unwrap()).collect();
        for i in 1..100 {
            let x = i as f64 / 100.0;
            let v = b.synthesize(&c, x, System::Psi).unwrap();
            assert!((v - x * (1.0 - x)).abs() < 1e-3);
        }
    }

    #[test]
    fn mode_table_rows() {
        let b = EigenBasis::new(ord(1.0), 6).unwrap();
        let t = ModeTable::new(&b, &[0.2, 0.7], 6, System::Phi);
        assert_eq!(t.row(1)[3], b.phi(4, 0.7).unwrap());
    }

    #[test]
    fn envelope_bounds_modes() {
        for &nu in &[-0.3, 0.0, 2.5] {
            let b = EigenBasis::new(ord(nu), 200).unwrap();
            let k = b.envelope_constant();
            let k1 = b.shifted_envelope_constant();
            for n in (1..=200).step_by(7) {
                for i in 1..400 {
                    let x = i as f64 / 400.0;
                    assert!(b.psi(n, x).unwrap().abs() <= k);
                    let s = b.norm_constant(n) * x.sqrt() * j_unchecked(nu + 1.0, b.lambda(n) * x);
                    assert!(s.abs() <= k1);
                }
            }
        }
    }
}
