//! Residual terms relating the interval heat semigroup to the half-line one for
//! functions supported in `I_0**`:
//! `rho T~_t f - T_t (rho f) = R1 + R2 + R3`, where
//! `R1 = int_0^t int T_{t-s}(x,z) rho''(z) T~_s f(z) dmu ds`,
//! `R2 = 2 int_0^t int d_z T_{t-s}(x,z) rho'(z) T~_s f(z) dmu ds`,
//! `R3 = int_0^t int T_{t-s}(x,z) rho'(z) (2nu+1)/z T~_s f(z) dmu ds`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::cutoff::CutoffRho;
use super::engine::{mode_row, resolvable_modes};
use crate::basis::{Domain, EigenBasis, MeasureTag, QuadGrid, SampledFunction, System};
use crate::error::{Error, Result};
use crate::kernels::{dz_heat_unchecked, heat_unchecked};
use crate::quadrature::{gl_rule, push_panel};

/// Relative split points of `[0, t]` for the time integral.
pub const S_SPLITS: [f64; 5] = [0.01, 0.1, 0.5, 0.9, 0.99];
/// Heat modes with `s lambda^2` above this are dropped.
const HEAT_CUTOFF: f64 = 40.0;
/// Gaussian exponent beyond which a heat kernel value counts as zero.
const NEGLIGIBLE_EXPONENT: f64 = 45.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DuhamelConfig {
    /// Gauss nodes per time panel.
    pub s_nodes: usize,
    /// Gauss nodes across the transition of `rho`.
    pub z_nodes: usize,
    /// Output points, uniform on `[x_min, x_max]`.
    pub x_min: f64,
    pub x_max: f64,
    pub n_x: usize,
}

impl Default for DuhamelConfig {
    fn default() -> Self {
        DuhamelConfig {
            s_nodes: 24,
            z_nodes: 32,
            x_min: 0.02,
            x_max: 0.5,
            n_x: 49,
        }
    }
}

impl DuhamelConfig {
    fn points(&self) -> Vec<f64> {
        let n = self.n_x.max(2);
        (0..n)
            .map(|i| self.x_min + (self.x_max - self.x_min) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// Nodes and weights for `int_0^t g(s) ds` on the split panels, with `s = a v^2`
/// substitutions on the first and last panel.
pub fn s_rule(t: f64, nodes: usize) -> Vec<(f64, f64)> {
    let rule = gl_rule(nodes);
    let mut out = Vec::new();
    let first = S_SPLITS[0] * t;
    let last = (1.0 - S_SPLITS[S_SPLITS.len() - 1]) * t;
    for &(u, w) in rule.iter() {
        let v = 0.5 * (u + 1.0);
        out.push((first * v * v, w * first * v));
    }
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for p in S_SPLITS.windows(2) {
        push_panel(&mut xs, &mut ws, p[0] * t, p[1] * t, nodes);
    }
    out.extend(xs.into_iter().zip(ws));
    for &(u, w) in rule.iter() {
        let v = 0.5 * (u + 1.0);
        out.push((t - last * v * v, w * last * v));
    }
    out
}

/// Output of `duhamel_residuals`.
#[derive(Debug, Clone)]
pub struct DuhamelResult {
    pub t: f64,
    /// `rho T~_t f - T_t (rho f)` at the output points.
    pub lhs: SampledFunction,
    pub r1: SampledFunction,
    pub r2: SampledFunction,
    pub r3: SampledFunction,
}

impl DuhamelResult {
    /// `sup |lhs - (R1 + R2 + R3)|` over the output points.
    pub fn closure_error(&self) -> f64 {
        let (l, a, b, c) = (self.lhs.values(), self.r1.values(), self.r2.values(), self.r3.values());
        (0..l.len()).map(|i| (l[i] - a[i] - b[i] - c[i]).abs()).fold(0.0, f64::max)
    }
}

struct Transition {
    z: Vec<f64>,
    /// `w mu(z) rho''`, `2 w mu(z) rho'`, `w mu(z) rho' (2nu+1)/z`
    c1: Vec<f64>,
    c2: Vec<f64>,
    c3: Vec<f64>,
}

impl Transition {
    fn new(rho: &CutoffRho, nu: f64, nodes: usize) -> Self {
        let (a, b) = rho.transition();
        let mut z = Vec::new();
        let mut w = Vec::new();
        push_panel(&mut z, &mut w, a, b, nodes);
        let p = 2.0 * nu + 1.0;
        let m: Vec<f64> = z.iter().zip(&w).map(|(z, w)| w * z.powf(p)).collect();
        Transition {
            c1: z.iter().zip(&m).map(|(&z, m)| m * rho.second(z)).collect(),
            c2: z.iter().zip(&m).map(|(&z, m)| 2.0 * m * rho.first(z)).collect(),
            c3: z.iter().zip(&m).map(|(&z, m)| m * rho.first(z) * p / z).collect(),
            z,
        }
    }

    /// Inner `z`-integrals of the three terms for one `(x, t - s)` against `g(z)`.
    fn terms(&self, nu: f64, tau: f64, x: f64, g: &[f64]) -> [f64; 3] {
        let mut r = [0.0; 3];
        for (k, &z) in self.z.iter().enumerate() {
            if g[k] == 0.0 {
                continue;
            }
            let h = heat_unchecked(nu, tau, x, z);
            let d = dz_heat_unchecked(nu, tau, x, z);
            r[0] += self.c1[k] * h * g[k];
            r[1] += self.c2[k] * d * g[k];
            r[2] += self.c3[k] * h * g[k];
        }
        r
    }
}

fn output_grid(basis: &EigenBasis, xs: &[f64]) -> Result<Arc<QuadGrid>> {
    // trapezoid weights on the uniform output points, for L^1 summaries
    let h = if xs.len() > 1 { xs[1] - xs[0] } else { 1.0 };
    let ws: Vec<f64> = (0..xs.len())
        .map(|i| if i == 0 || i + 1 == xs.len() { 0.5 * h } else { h })
        .collect();
    Ok(Arc::new(QuadGrid::from_parts(Domain::UnitInterval, MeasureTag::Mu, basis.order(), xs.to_vec(), ws)?))
}

/// The three residuals of the cutoff identity at time `t` for `f` supported in the
/// inner interval of `rho`, together with the left-hand side.
pub fn duhamel_residuals(
    basis: &EigenBasis,
    rho: &CutoffRho,
    f: &SampledFunction,
    t: f64,
    cfg: &DuhamelConfig,
) -> Result<DuhamelResult> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::invalid(format!("time must lie in (0, 1), got {t}")));
    }
    f.expect_tag(MeasureTag::Mu)?;
    if f.domain() != Domain::UnitInterval || f.grid().order() != basis.order() {
        return Err(Error::invalid("input must live on (0, 1) with the basis order"));
    }
    let edge = rho.inner.b;
    if f.nodes().iter().zip(f.values()).any(|(&x, &v)| x > edge && v != 0.0) {
        return Err(Error::invalid(format!("input not supported in (0, {edge}]")));
    }
    if cfg.x_max >= edge {
        return Err(Error::invalid("output points must stay left of the cutoff transition"));
    }
    let nu = basis.order().value();
    let xs = cfg.points();
    let tr = Transition::new(rho, nu, cfg.z_nodes);

    // expansion of f; the interval heat semigroup is diagonal in it
    let m = resolvable_modes(f.grid()).min(basis.len());
    let mut coeffs = vec![0.0; m];
    let mut row = vec![0.0; m];
    for ((&x, &v), &w) in f.nodes().iter().zip(f.values()).zip(f.weights()) {
        if v == 0.0 {
            continue;
        }
        mode_row(basis, System::Phi, x, &mut row);
        for (c, r) in coeffs.iter_mut().zip(&row) {
            *c += w * v * r;
        }
    }
    let lambdas = &basis.zeros()[..m];
    let z_rows: Vec<Vec<f64>> = tr
        .z
        .iter()
        .map(|&z| {
            let mut r = vec![0.0; m];
            mode_row(basis, System::Phi, z, &mut r);
            r.iter().zip(&coeffs).map(|(a, c)| a * c).collect()
        })
        .collect();
    let heat_at = |s: f64, r: &[f64]| -> f64 {
        lambdas
            .iter()
            .zip(r)
            .take_while(|(l, _)| s * *l * *l <= HEAT_CUTOFF)
            .map(|(l, v)| (-s * l * l).exp() * v)
            .sum()
    };

    let mut lhs = Vec::with_capacity(xs.len());
    for &x in &xs {
        mode_row(basis, System::Phi, x, &mut row);
        let interval: f64 = lambdas
            .iter()
            .zip(&row)
            .zip(&coeffs)
            .map(|((l, p), c)| (-t * l * l).exp() * p * c)
            .sum();
        let half: f64 = f
            .nodes()
            .iter()
            .zip(f.values())
            .zip(f.weights())
            .filter(|((_, v), _)| **v != 0.0)
            .map(|((&y, &v), &w)| w * v * heat_unchecked(nu, t, x, y))
            .sum();
        lhs.push(interval - half);
    }

    let mut acc = vec![[0.0; 3]; xs.len()];
    for (s, ws) in s_rule(t, cfg.s_nodes) {
        let tau = t - s;
        if tau <= 0.0 || s <= 0.0 {
            continue;
        }
        let g: Vec<f64> = z_rows.iter().map(|r| heat_at(s, r)).collect();
        for (a, &x) in acc.iter_mut().zip(&xs) {
            let r = tr.terms(nu, tau, x, &g);
            for j in 0..3 {
                a[j] += ws * r[j];
            }
        }
    }
    let grid = output_grid(basis, &xs)?;
    let col = |j: usize| SampledFunction::new(Arc::clone(&grid), acc.iter().map(|a| a[j]).collect());
    Ok(DuhamelResult {
        t,
        lhs: SampledFunction::new(Arc::clone(&grid), lhs)?,
        r1: col(0)?,
        r2: col(1)?,
        r3: col(2)?,
    })
}

/// Largest `|R^{[j]}_t(x, y)|` over the given times and point pairs, per `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualKernelBound {
    pub times: Vec<f64>,
    pub points: Vec<f64>,
    pub max_abs: [f64; 3],
}

/// Residual kernels `R^{[j]}_t(x, y)` on a product grid of `points` (all left of the
/// transition), using the interval heat kernel series for `T~_s(z, y)`.
pub fn residual_kernel_bound(
    basis: &EigenBasis,
    rho: &CutoffRho,
    times: &[f64],
    points: &[f64],
    cfg: &DuhamelConfig,
) -> Result<ResidualKernelBound> {
    let nu = basis.order().value();
    let tr = Transition::new(rho, nu, cfg.z_nodes);
    let (edge, _) = rho.transition();
    if points.iter().any(|&p| !(p > 0.0 && p < edge)) {
        return Err(Error::invalid("kernel points must lie inside the inner interval"));
    }
    let m = basis.len();
    let lambdas = basis.zeros();
    let z_tab: Vec<Vec<f64>> = tr
        .z
        .iter()
        .map(|&z| {
            let mut r = vec![0.0; m];
            mode_row(basis, System::Phi, z, &mut r);
            r
        })
        .collect();
    let mut max_abs = [0.0f64; 3];
    for &y in points {
        let mut yrow = vec![0.0; m];
        mode_row(basis, System::Phi, y, &mut yrow);
        let gap = tr.z.iter().map(|z| (z - y).abs()).fold(f64::INFINITY, f64::min);
        for &t in times {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::invalid(format!("time must lie in (0, 1), got {t}")));
            }
            let rule = s_rule(t, cfg.s_nodes);
            let mut acc = vec![[0.0; 3]; points.len()];
            for &(s, ws) in &rule {
                let tau = t - s;
                if tau <= 0.0 || s <= 0.0 {
                    continue;
                }
                let n = lambdas.partition_point(|&l| s * l * l <= HEAT_CUTOFF);
                let g: Vec<f64> = if n >= m {
                    if gap * gap / (4.0 * s) < NEGLIGIBLE_EXPONENT {
                        return Err(Error::no_conv(
                            "residual_kernel_bound",
                            format!("{m} modes do not resolve the heat kernel at s={s:e}"),
                        ));
                    }
                    vec![0.0; tr.z.len()]
                } else {
                    z_tab
                        .iter()
                        .map(|zr| {
                            (0..n).map(|k| (-s * lambdas[k] * lambdas[k]).exp() * zr[k] * yrow[k]).sum()
                        })
                        .collect()
                };
                for (a, &x) in acc.iter_mut().zip(points) {
                    let r = tr.terms(nu, tau, x, &g);
                    for j in 0..3 {
                        a[j] += ws * r[j];
                    }
                }
            }
            for a in &acc {
                for j in 0..3 {
                    max_abs[j] = max_abs[j].max(a[j].abs());
                }
            }
        }
    }
    Ok(ResidualKernelBound {
        times: times.to_vec(),
        points: points.to_vec(),
        max_abs,
    })
}
