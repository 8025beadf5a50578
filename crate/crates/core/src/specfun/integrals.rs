//! `G(Z) = int_0^Z z^{1/2} J_nu(z) dz`, needed for exact coefficients of
//! piecewise-constant functions in the Lebesgue-weighted basis.

use statrs::function::gamma::{gamma, ln_gamma};

use super::bessel::{j_pair_unchecked, j_unchecked};
use super::Order;
use crate::quadrature::gl_rule;

const SERIES_END: f64 = 2.0;
const ANCHOR_STEP: f64 = 1.0;
const ASYMPTOTIC_START: f64 = 200.0;
const PANEL_NODES: usize = 24;

/// Tabulated evaluator for `G`.
#[derive(Debug, Clone)]
pub struct SqrtBesselIntegral {
    nu: f64,
    anchors: Vec<f64>,
    limit: f64,
}

impl SqrtBesselIntegral {
    pub fn new(order: Order) -> Self {
        let nu = order.value();
        let n_anchor = (ASYMPTOTIC_START / ANCHOR_STEP) as usize;
        let mut anchors = Vec::with_capacity(n_anchor + 1);
        anchors.push(0.0);
        let mut acc = 0.0;
        for i in 1..=n_anchor {
            let b = i as f64 * ANCHOR_STEP;
            if b <= SERIES_END {
                acc = series(nu, b);
            } else {
                acc += panel(nu, b - ANCHOR_STEP, b);
            }
            anchors.push(acc);
        }
        let limit = 2f64.sqrt() * (ln_gamma(0.5 * nu + 0.75) - ln_gamma(0.5 * nu + 0.25)).exp();
        SqrtBesselIntegral { nu, anchors, limit }
    }

    /// The Abel-summed value of the integral over the whole half-line.
    pub fn limit(&self) -> f64 {
        self.limit
    }

    pub fn eval(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        if z <= SERIES_END {
            return series(self.nu, z);
        }
        if z < ASYMPTOTIC_START {
            let i = (z / ANCHOR_STEP).floor() as usize;
            let a = i as f64 * ANCHOR_STEP;
            return self.anchors[i] + panel(self.nu, a, z);
        }
        self.asymptotic(z)
    }

    /// Repeated integration by parts on the tail, anchored at the closed-form
    /// value of the conditionally convergent integral of `z^{-1/2} J_{nu+1}`.
    fn asymptotic(&self, z: f64) -> f64 {
        let nu = self.nu;
        let (j1, j2) = j_pair_unchecked(nu + 1.0, z);
        let tail = tail_by_parts(nu + 1.0, -0.5, z, j1, j2);
        let c1 = std::f64::consts::FRAC_1_SQRT_2
            * (ln_gamma(0.5 * nu + 0.75) - ln_gamma(0.5 * nu + 1.25)).exp();
        z.sqrt() * j1 + (nu + 0.5) * (c1 - tail)
    }
}

/// `int_z^inf s^alpha J_mu(s) ds` by repeated parts, given `J_mu(z)` and `J_{mu+1}(z)`.
fn tail_by_parts(mu: f64, alpha: f64, z: f64, j_mu: f64, j_mu1: f64) -> f64 {
    let mut lo = j_mu;
    let mut hi = j_mu1;
    let mut order = mu + 1.0;
    let mut coef = 1.0;
    let mut a = alpha;
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    for k in 0..40 {
        let term = -coef * z.powf(a) * hi;
        let bound = coef * z.powf(a - 0.5);
        if bound > prev {
            break;
        }
        prev = bound;
        sum += term;
        if bound < 1e-18 {
            break;
        }
        coef *= mu + k as f64 + 1.0 - a;
        a -= 1.0;
        let next = 2.0 * order / z * hi - lo;
        lo = hi;
        hi = next;
        order += 1.0;
    }
    sum
}

fn series(nu: f64, z: f64) -> f64 {
    let mut s = 0.0;
    let half = 0.5 * z;
    for k in 0..60 {
        let kf = k as f64;
        let p = 2.0 * kf + nu + 1.5;
        let mag = half.powf(2.0 * kf + nu) / (gamma(kf + 1.0) * gamma(kf + nu + 1.0)) * z.powf(1.5) / p;
        if k % 2 == 0 {
            s += mag;
        } else {
            s -= mag;
        }
        if mag < 1e-18 * s.abs() && kf > half {
            break;
        }
    }
    s
}

fn panel(nu: f64, a: f64, b: f64) -> f64 {
    let rule = gl_rule(PANEL_NODES);
    let h = 0.5 * (b - a);
    let m = 0.5 * (b + a);
    rule.iter()
        .map(|&(x, w)| {
            let z = m + h * x;
            w * z.sqrt() * j_unchecked(nu, z)
        })
        .sum::<f64>()
        * h
}
