//! Small-time comparison of the interval and half-line Poisson semigroups for
//! inputs supported in `I_0**`.
//!
//! `P_t f - calP_t f` is written as the subordinated heat difference
//! `int_0^inf t (4 pi)^{-1/2} s^{-3/2} e^{-t^2/4s} (T_s f - calT_s f) ds`.
//! The heat difference is exponentially small for small `s` because both points stay
//! at distance about 1/2 from the boundary point 1, so the `s` integral starts at
//! [`S_START`]. Beyond `s_max` the interval part is negligible and the half-line part
//! decays like `s^{-nu-1}`, which is integrated in closed form.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::engine::mode_row;
use crate::basis::{EigenBasis, StepFunction, System};
use crate::error::{Error, Result};
use crate::hardy::Family;
use crate::kernels::heat_unchecked;
use crate::quadrature::gl_rule;

/// Below this heat time the difference is below `e^{-0.24/s} < e^{-45}`.
pub const S_START: f64 = 5e-3;
const HEAT_CUTOFF: f64 = 40.0;
const CELL_NODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonConfig {
    pub x_panels: usize,
    pub x_nodes: usize,
    /// Step in `ln s` for the subordination integral.
    pub log_s_step: f64,
    pub s_max: f64,
    pub n_times: usize,
    pub t_min: f64,
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        ComparisonConfig {
            x_panels: 16,
            x_nodes: 6,
            log_s_step: 0.1,
            s_max: 1e4,
            n_times: 30,
            t_min: 1e-4,
        }
    }
}

impl ComparisonConfig {
    /// Doubles the output nodes and time samples and halves the `ln s` step.
    pub fn refined(&self) -> Self {
        ComparisonConfig {
            x_panels: 2 * self.x_panels,
            log_s_step: 0.5 * self.log_s_step,
            n_times: 2 * self.n_times - 1,
            ..*self
        }
    }

    fn validate(&self) -> Result<()> {
        if self.x_panels == 0 || self.x_nodes == 0 || self.n_times < 2 {
            return Err(Error::invalid("need positive panel and node counts and at least two times"));
        }
        if !(self.log_s_step > 0.0 && self.log_s_step <= 0.5) {
            return Err(Error::invalid("log_s_step must lie in (0, 0.5]"));
        }
        if !(self.s_max >= 100.0) || !(self.t_min > 0.0 && self.t_min < 0.1) {
            return Err(Error::invalid("need s_max >= 100 and t_min in (0, 0.1)"));
        }
        Ok(())
    }

    /// Geometric times in `[t_min, 0.999]`.
    pub fn times(&self) -> Vec<f64> {
        let (lo, hi) = (self.t_min.ln(), 0.999f64.ln());
        (0..self.n_times)
            .map(|k| (lo + (hi - lo) * k as f64 / (self.n_times - 1) as f64).exp())
            .collect()
    }
}

/// Cell-wise responses `sup`-ready: for every cell of a fixed partition of `I_0**`
/// the values `(P_t - calP_t) chi_cell` at each time and output node.
pub struct ComparisonEngine {
    nu: f64,
    breaks: Vec<f64>,
    xs: Vec<f64>,
    wx: Vec<f64>,
    times: Vec<f64>,
    /// `[cell][time][node]`
    response: Vec<Vec<Vec<f64>>>,
}

fn inner_edge() -> f64 {
    Family::I.interval(0).expect("index 0 exists").stars(2).b
}

impl ComparisonEngine {
    /// `breaks` must increase from 0 to at most the right end of `I_0**`.
    pub fn new(basis: &EigenBasis, breaks: &[f64], cfg: &ComparisonConfig) -> Result<Self> {
        cfg.validate()?;
        let edge = inner_edge();
        if breaks.len() < 2 || breaks[0] < 0.0 || *breaks.last().unwrap() > edge * (1.0 + 1e-12) {
            return Err(Error::invalid(format!("cell breaks must lie in [0, {edge}]")));
        }
        if breaks.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("cell breaks must increase"));
        }
        let order = basis.order();
        let nu = order.value();
        let p = 2.0 * nu + 1.0;

        // output nodes with mu weights on (0, edge]
        let rule = gl_rule(cfg.x_nodes);
        let mut xs = Vec::new();
        let mut wx = Vec::new();
        let width = edge / cfg.x_panels as f64;
        for k in 0..cfg.x_panels {
            let (a, b) = (k as f64 * width, (k + 1) as f64 * width);
            for &(z, w) in rule.iter() {
                let x = 0.5 * (a + b) + 0.5 * (b - a) * z;
                xs.push(x);
                wx.push(0.5 * (b - a) * w * x.powf(p));
            }
        }

        // exact eigen-coefficients of every cell indicator
        let modes = basis.zeros().partition_point(|&l| S_START * l * l <= HEAT_CUTOFF);
        if modes >= basis.len() {
            return Err(Error::no_conv(
                "compare_semigroups",
                format!("basis of {} modes too small, need {modes}", basis.len()),
            ));
        }
        let cells = breaks.len() - 1;
        let coeffs: Vec<Vec<f64>> = (0..cells)
            .map(|c| StepFunction::indicator(breaks[c], breaks[c + 1], 1.0)?.coeffs_phi(basis, modes))
            .collect::<Result<_>>()?;
        let rows: Vec<Vec<f64>> = xs
            .iter()
            .map(|&x| {
                let mut r = vec![0.0; modes];
                mode_row(basis, System::Phi, x, &mut r);
                r
            })
            .collect();
        let lambdas = &basis.zeros()[..modes];

        let times = cfg.times();
        let n_x = xs.len();
        let mut response = vec![vec![vec![0.0; n_x]; times.len()]; cells];
        let n_s = ((cfg.s_max / S_START).ln() / cfg.log_s_step).ceil() as usize;
        let h = (cfg.s_max / S_START).ln() / n_s as f64;
        let cell_rule = gl_rule(CELL_NODES);
        let mut diff = vec![vec![0.0; n_x]; cells];
        for k in 0..=n_s {
            let s = S_START * (k as f64 * h).exp();
            let end = k == 0 || k == n_s;
            // interval heat on each cell
            let decay: Vec<f64> = lambdas.iter().map(|&l| (-s * l * l).exp()).collect();
            let kept = decay.partition_point(|&d| d > (-HEAT_CUTOFF).exp());
            let panel_max = 0.5 * s.sqrt();
            for c in 0..cells {
                let (a, b) = (breaks[c], breaks[c + 1]);
                let panels = ((b - a) / panel_max).ceil().max(1.0) as usize;
                let pw = (b - a) / panels as f64;
                for (i, &x) in xs.iter().enumerate() {
                    let interval: f64 = (0..kept).map(|n| decay[n] * coeffs[c][n] * rows[i][n]).sum();
                    let mut half = 0.0;
                    for q in 0..panels {
                        let (pa, pb) = (a + q as f64 * pw, a + (q + 1) as f64 * pw);
                        let gap = if x < pa { pa - x } else if x > pb { x - pb } else { 0.0 };
                        if gap * gap / (4.0 * s) > 45.0 {
                            continue;
                        }
                        for &(z, w) in cell_rule.iter() {
                            let y = 0.5 * (pa + pb) + 0.5 * (pb - pa) * z;
                            half += 0.5 * (pb - pa) * w * y.powf(p) * heat_unchecked(nu, s, x, y);
                        }
                    }
                    diff[c][i] = half - interval;
                }
            }
            // trapezoid in ln s plus the closed-form tail at the top end
            for (ti, &t) in times.iter().enumerate() {
                let sub = t / (2.0 * PI.sqrt()) * s.powf(-1.5) * (-t * t / (4.0 * s)).exp();
                let mut weight = sub * s * h * if end { 0.5 } else { 1.0 };
                if k == n_s {
                    weight += t / (2.0 * PI.sqrt()) * s.powf(-0.5) / (nu + 1.5);
                }
                for c in 0..cells {
                    let out = &mut response[c][ti];
                    for i in 0..n_x {
                        out[i] += weight * diff[c][i];
                    }
                }
            }
        }
        Ok(ComparisonEngine {
            nu,
            breaks: breaks.to_vec(),
            xs,
            wx,
            times,
            response,
        })
    }

    pub fn cells(&self) -> usize {
        self.breaks.len() - 1
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn nodes(&self) -> &[f64] {
        &self.xs
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// `sup_t |(P_t - calP_t) f|` at the output nodes for cell heights `heights`.
    pub fn sup_difference(&self, heights: &[f64]) -> Result<Vec<f64>> {
        if heights.len() != self.cells() {
            return Err(Error::invalid(format!("expected {} heights, got {}", self.cells(), heights.len())));
        }
        let mut sup = vec![0.0f64; self.xs.len()];
        for ti in 0..self.times.len() {
            for (i, s) in sup.iter_mut().enumerate() {
                let v: f64 = heights.iter().enumerate().map(|(c, &hc)| hc * self.response[c][ti][i]).sum();
                *s = s.max(v.abs());
            }
        }
        Ok(sup)
    }

    /// `|| sup_t |(P_t - calP_t) f| ||_{L^1(I_0**, mu)} / ||f||_{L^1(mu)}`; zero for `f = 0`.
    pub fn ratio(&self, heights: &[f64]) -> Result<f64> {
        let p = 2.0 * self.nu + 2.0;
        let norm: f64 = heights
            .iter()
            .zip(self.breaks.windows(2))
            .map(|(&hc, w)| hc.abs() * (w[1].powf(p) - w[0].powf(p)) / p)
            .sum();
        if norm == 0.0 {
            return Ok(0.0);
        }
        let sup = self.sup_difference(heights)?;
        Ok(sup.iter().zip(&self.wx).map(|(s, w)| s * w).sum::<f64>() / norm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub nu: f64,
    pub ratio: f64,
    pub refined_ratio: f64,
    pub relative_change: f64,
    pub config: ComparisonConfig,
}

/// Ratio for a step function supported in `I_0**`, together with its value on the
/// refined configuration.
pub fn compare_semigroups(basis: &EigenBasis, f: &StepFunction, cfg: &ComparisonConfig) -> Result<ComparisonReport> {
    let edge = inner_edge();
    let (lo, hi) = f.support();
    if lo < 0.0 || hi > edge * (1.0 + 1e-12) {
        return Err(Error::invalid(format!("input must be supported in (0, {edge}]")));
    }
    let mut breaks = f.breaks().to_vec();
    let mut heights = f.heights().to_vec();
    if breaks[0] > 0.0 {
        breaks.insert(0, 0.0);
        heights.insert(0, 0.0);
    }
    let run = |c: &ComparisonConfig| -> Result<f64> { ComparisonEngine::new(basis, &breaks, c)?.ratio(&heights) };
    let ratio = run(cfg)?;
    let refined_ratio = run(&cfg.refined())?;
    Ok(ComparisonReport {
        nu: basis.order().value(),
        ratio,
        refined_ratio,
        relative_change: if ratio == 0.0 { 0.0 } else { (refined_ratio - ratio).abs() / ratio },
        config: *cfg,
    })
}
