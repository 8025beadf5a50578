//! Semigroups applied to functions and their pointwise suprema over a time grid.

use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::timegrid::{TimeGrid, SPLIT};
use crate::basis::{Domain, EigenBasis, MeasureTag, QuadGrid, SampledFunction, StepFunction, System};
use crate::error::{Error, Result};
use crate::kernels::{heat_unchecked, poisson_kernel_halfline, Decay};
use crate::quadrature::push_panel;
use crate::specfun::{j_unchecked, Order, SqrtBesselIntegral};

/// Modes whose decay exponent `t lambda` (or `t lambda^2`) exceeds this are dropped.
pub const DECAY_CUTOFF: f64 = 20.0;
/// A sampled input resolves roughly one mode per this many quadrature nodes.
pub const NODES_PER_MODE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelKind {
    /// `e^{-t sqrt(calL)}` on `(0, 1)` with the measure `mu`.
    BesselPoisson,
    /// `e^{-t sqrt(L)}` on `(0, 1)` with Lebesgue measure.
    Poisson,
    /// `e^{-t calL}` on `(0, 1)`.
    BesselHeat,
    /// Heat semigroup of the Bessel operator on the half-line.
    HalfLineHeat,
    /// Poisson semigroup of the Bessel operator on the half-line.
    HalfLinePoisson,
}

pub const ALL_KINDS: [KernelKind; 5] = [
    KernelKind::BesselPoisson,
    KernelKind::Poisson,
    KernelKind::BesselHeat,
    KernelKind::HalfLineHeat,
    KernelKind::HalfLinePoisson,
];

impl KernelKind {
    pub fn id(self) -> &'static str {
        match self {
            KernelKind::BesselPoisson => "calP",
            KernelKind::Poisson => "P",
            KernelKind::BesselHeat => "calT",
            KernelKind::HalfLineHeat => "T-halfline",
            KernelKind::HalfLinePoisson => "P-halfline",
        }
    }

    pub fn tag(self) -> MeasureTag {
        match self {
            KernelKind::Poisson => MeasureTag::Lebesgue,
            _ => MeasureTag::Mu,
        }
    }

    fn series(self) -> Option<(System, Decay)> {
        match self {
            KernelKind::BesselPoisson => Some((System::Phi, Decay::Poisson)),
            KernelKind::Poisson => Some((System::Psi, Decay::Poisson)),
            KernelKind::BesselHeat => Some((System::Phi, Decay::Heat)),
            _ => None,
        }
    }
}

impl FromStr for KernelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ALL_KINDS
            .iter()
            .copied()
            .find(|k| k.id() == s)
            .ok_or_else(|| Error::invalid(format!("unknown kernel '{s}'")))
    }
}

fn exponent(decay: Decay, t: f64, lambda: f64) -> f64 {
    match decay {
        Decay::Poisson => t * lambda,
        Decay::Heat => t * lambda * lambda,
    }
}

/// Modes kept at time `t`: those with decay exponent at most `DECAY_CUTOFF`.
fn kept_modes(basis: &EigenBasis, decay: Decay, t: f64) -> usize {
    basis.zeros().partition_point(|&l| exponent(decay, t, l) <= DECAY_CUTOFF)
}

/// Basis size needed for exact-coefficient suprema down to `t_min`.
pub fn required_modes(decay: Decay, t_min: f64) -> usize {
    let lambda = match decay {
        Decay::Poisson => DECAY_CUTOFF / t_min,
        Decay::Heat => (DECAY_CUTOFF / t_min).sqrt(),
    };
    (lambda / std::f64::consts::PI) as usize + 2
}

/// `phi_n(x)` or `psi_n(x)` for `n = 1..=out.len()`, with the `x`-power hoisted.
pub(crate) fn mode_row(basis: &EigenBasis, sys: System, x: f64, out: &mut [f64]) {
    let nu = basis.order().value();
    let pre = match sys {
        System::Phi => x.powf(-nu),
        System::Psi => x.sqrt(),
    };
    let zeros = basis.zeros();
    let norms = basis.norms();
    if sys == System::Phi && x * zeros[0] < 1.0 {
        // near the origin x^{-nu} J_nu loses digits for large nu; use the reduced form
        for (n, o) in out.iter_mut().enumerate() {
            *o = basis.phi_unchecked(n + 1, x);
        }
        return;
    }
    for (n, o) in out.iter_mut().enumerate() {
        *o = pre * norms[n] * j_unchecked(nu, zeros[n] * x);
    }
}

/// Time weights `e^{-t lambda}` per grid time, truncated per time.
struct SupPlan {
    times: Vec<f64>,
    weights: Vec<Vec<f64>>,
}

impl SupPlan {
    fn new(basis: &EigenBasis, decay: Decay, times: &[f64], cap: usize) -> Self {
        let weights = times
            .iter()
            .map(|&t| {
                let n = kept_modes(basis, decay, t).min(cap);
                basis.zeros()[..n].iter().map(|&l| decay.weight(t, l)).collect()
            })
            .collect();
        SupPlan {
            times: times.to_vec(),
            weights,
        }
    }

    fn modes(&self) -> usize {
        self.weights.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn values<'a>(&'a self, v: &'a [f64]) -> impl Iterator<Item = (f64, f64)> + 'a {
        self.times
            .iter()
            .zip(&self.weights)
            .map(move |(&t, w)| (t, w.iter().zip(v).map(|(a, b)| a * b).sum()))
    }
}

/// Running suprema below and above the split time at one node.
#[derive(Debug, Clone, Copy, Default)]
struct NodeSup {
    small: f64,
    small_at: f64,
    large: f64,
    large_at: f64,
}

impl NodeSup {
    fn push(&mut self, t: f64, v: f64) {
        let a = v.abs();
        if t < SPLIT {
            if a > self.small {
                self.small = a;
                self.small_at = t;
            }
        } else if a > self.large {
            self.large = a;
            self.large_at = t;
        }
    }
}

/// Discretized maximal function with its split at `t = 1`.
#[derive(Debug, Clone)]
pub struct MaximalResult {
    pub kind: KernelKind,
    pub grid: TimeGrid,
    /// `sup_{t < 1}`, including the `t -> 0` limit when the grid carries it.
    pub small: SampledFunction,
    /// `sup_{t >= 1}`.
    pub large: SampledFunction,
    /// Time attaining the overall maximum per node; 0 marks the `t -> 0` limit.
    pub argmax: Vec<f64>,
}

impl MaximalResult {
    fn assemble(kind: KernelKind, grid: TimeGrid, out: Arc<QuadGrid>, sups: &[NodeSup]) -> Result<Self> {
        let small = SampledFunction::new(Arc::clone(&out), sups.iter().map(|s| s.small).collect())?;
        let large = SampledFunction::new(out, sups.iter().map(|s| s.large).collect())?;
        let argmax = sups
            .iter()
            .map(|s| if s.large > s.small { s.large_at } else { s.small_at })
            .collect();
        Ok(MaximalResult {
            kind,
            grid,
            small,
            large,
            argmax,
        })
    }

    /// Pointwise maximum of the two parts.
    pub fn function(&self) -> SampledFunction {
        let large = self.large.values();
        let vals = self
            .small
            .values()
            .iter()
            .zip(large)
            .map(|(a, b)| a.max(*b))
            .collect();
        SampledFunction::new(Arc::clone(self.small.grid()), vals).expect("same grid")
    }

    pub fn l1_norm(&self) -> f64 {
        self.function().l1_norm()
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("time must be positive, got {t}")));
    }
    Ok(())
}

fn check_input(basis: &EigenBasis, kind: KernelKind, f: &SampledFunction) -> Result<()> {
    f.expect_tag(kind.tag())?;
    if f.grid().order() != basis.order() {
        return Err(Error::invalid("function and basis have different orders"));
    }
    if kind.series().is_some() && f.domain() != Domain::UnitInterval {
        return Err(Error::invalid(format!("kernel {} acts on (0, 1) only", kind.id())));
    }
    Ok(())
}

/// Modes a sampled input can resolve.
pub fn resolvable_modes(grid: &QuadGrid) -> usize {
    (grid.len() / NODES_PER_MODE).max(1)
}

/// Expansion coefficients by quadrature plus the per-node mode rows they came from.
fn sampled_modes(basis: &EigenBasis, sys: System, f: &SampledFunction) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = resolvable_modes(f.grid()).min(basis.len());
    let mut coeffs = vec![0.0; n];
    let mut rows = Vec::with_capacity(f.nodes().len());
    for ((&x, &v), &w) in f.nodes().iter().zip(f.values()).zip(f.weights()) {
        let mut row = vec![0.0; n];
        mode_row(basis, sys, x, &mut row);
        for (c, r) in coeffs.iter_mut().zip(&row) {
            *c += w * v * r;
        }
        rows.push(row);
    }
    (coeffs, rows)
}

fn halfline_value(nu: f64, order: Order, kind: KernelKind, t: f64, x: f64, y: f64) -> Result<f64> {
    match kind {
        KernelKind::HalfLineHeat => Ok(heat_unchecked(nu, t, x, y)),
        _ => poisson_kernel_halfline(order, t, x, y),
    }
}

fn halfline_apply(kind: KernelKind, f: &SampledFunction, t: f64) -> Result<Vec<f64>> {
    let order = f.grid().order();
    let nu = order.value();
    f.nodes()
        .iter()
        .map(|&x| {
            let mut s = 0.0;
            for ((&y, &v), &w) in f.nodes().iter().zip(f.values()).zip(f.weights()) {
                if v != 0.0 {
                    s += w * v * halfline_value(nu, order, kind, t, x, y)?;
                }
            }
            Ok(s)
        })
        .collect()
}

/// The semigroup at time `t` applied to `f`, evaluated at the nodes of `f`.
///
/// Interval kernels expand `f` in the eigenbasis using the modes its grid resolves;
/// half-line kernels integrate the kernel against `f` with the grid's rule.
pub fn apply_poisson(basis: &EigenBasis, kind: KernelKind, f: &SampledFunction, t: f64) -> Result<SampledFunction> {
    check_time(t)?;
    check_input(basis, kind, f)?;
    let vals = match kind.series() {
        Some((sys, decay)) => {
            let (coeffs, rows) = sampled_modes(basis, sys, f);
            let n = kept_modes(basis, decay, t).min(coeffs.len());
            let w: Vec<f64> = basis.zeros()[..n].iter().zip(&coeffs).map(|(&l, c)| decay.weight(t, l) * c).collect();
            rows.iter().map(|r| w.iter().zip(r).map(|(a, b)| a * b).sum()).collect()
        }
        None => halfline_apply(kind, f, t)?,
    };
    SampledFunction::new(Arc::clone(f.grid()), vals)
}

/// `sup_t |e^{-t A} f|` over `grid` at the nodes of `f`.
pub fn maximal_function(basis: &EigenBasis, kind: KernelKind, f: &SampledFunction, grid: &TimeGrid) -> Result<MaximalResult> {
    check_input(basis, kind, f)?;
    let mut sups = vec![NodeSup::default(); f.nodes().len()];
    if grid.with_trace() {
        for (s, v) in sups.iter_mut().zip(f.values()) {
            s.push(0.0, *v);
        }
    }
    match kind.series() {
        Some((sys, decay)) => {
            let (coeffs, rows) = sampled_modes(basis, sys, f);
            let plan = SupPlan::new(basis, decay, grid.times(), coeffs.len());
            let mut v = vec![0.0; coeffs.len()];
            for (s, row) in sups.iter_mut().zip(&rows) {
                for ((o, c), r) in v.iter_mut().zip(&coeffs).zip(row) {
                    *o = c * r;
                }
                for (t, val) in plan.values(&v) {
                    s.push(t, val);
                }
            }
        }
        None => {
            for &t in grid.times() {
                for (s, val) in sups.iter_mut().zip(halfline_apply(kind, f, t)?) {
                    s.push(t, val);
                }
            }
        }
    }
    MaximalResult::assemble(kind, grid.clone(), Arc::clone(f.grid()), &sups)
}

/// `(M0, Minf)`: suprema over `t < 1` and `t >= 1` on the standard grid.
pub fn split_maximal(basis: &EigenBasis, kind: KernelKind, f: &SampledFunction) -> Result<(SampledFunction, SampledFunction)> {
    let r = maximal_function(basis, kind, f, &TimeGrid::standard())?;
    Ok((r.small, r.large))
}

/// Output nodes for a step function: Gauss panels on `(0, 1)` graded toward each
/// breakpoint, finest width `min piece / 16`.
pub fn step_output_grid(f: &StepFunction, order: Order, tag: MeasureTag, nodes_per_panel: usize) -> Result<Arc<QuadGrid>> {
    let mut keys: Vec<f64> = f.breaks().iter().copied().filter(|&b| b > 0.0 && b < 1.0).collect();
    let piece = f.breaks().windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let fine = (piece / 16.0).min(1.0 / 64.0);
    keys.dedup();
    let mut cuts = vec![0.0];
    cuts.extend(&keys);
    cuts.push(1.0);
    let mut breaks = vec![0.0];
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let left_graded = a > 0.0;
        let right_graded = b < 1.0;
        let seg = graded_segment(a, b, fine, left_graded, right_graded);
        breaks.extend(seg.into_iter().skip(1));
    }
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for w in breaks.windows(2) {
        push_panel(&mut xs, &mut ws, w[0], w[1], nodes_per_panel);
    }
    Ok(Arc::new(QuadGrid::from_parts(Domain::UnitInterval, tag, order, xs, ws)?))
}

/// Breakpoints of `[a, b]` growing by 3x away from each graded end, capped at 1/8.
fn graded_segment(a: f64, b: f64, fine: f64, left: bool, right: bool) -> Vec<f64> {
    const GROWTH: f64 = 3.0;
    const COARSE: f64 = 0.125;
    let len = b - a;
    let from = |origin: f64, dir: f64, span: f64| -> Vec<f64> {
        let mut pts = Vec::new();
        let mut w = fine.min(span);
        let mut d = 0.0;
        while d + w < span - 1e-15 * len {
            d += w;
            pts.push(origin + dir * d);
            w = (w * GROWTH).min(COARSE);
        }
        pts
    };
    let mut out = vec![a];
    match (left, right) {
        (true, true) => {
            let half = 0.5 * len;
            out.extend(from(a, 1.0, half));
            out.push(a + half);
            let mut r = from(b, -1.0, half);
            r.reverse();
            out.extend(r);
        }
        (true, false) => out.extend(from(a, 1.0, len)),
        (false, true) => {
            let mut r = from(b, -1.0, len);
            r.reverse();
            out.extend(r);
        }
        (false, false) => {
            let n = (len / COARSE).ceil() as usize;
            out.extend((1..n).map(|i| a + len * i as f64 / n as f64));
        }
    }
    out.push(b);
    out.dedup_by(|x, y| (*x - *y).abs() <= 1e-15);
    out
}

/// Maximal functions of a step function on several time grids at once, using exact
/// expansion coefficients. The basis must hold `required_modes` for the smallest time.
pub fn maximal_step_multi(
    basis: &EigenBasis,
    kind: KernelKind,
    f: &StepFunction,
    grids: &[TimeGrid],
    out: Arc<QuadGrid>,
) -> Result<Vec<MaximalResult>> {
    let (sys, decay) = kind
        .series()
        .ok_or_else(|| Error::invalid("exact step coefficients need an interval kernel"))?;
    if out.tag() != kind.tag() {
        return Err(Error::MeasureMismatch {
            expected: kind.tag().name(),
            found: out.tag().name(),
        });
    }
    let t_min = grids.iter().map(|g| g.t_min()).fold(f64::INFINITY, f64::min);
    let count = kept_modes(basis, decay, t_min);
    if count >= basis.len() {
        return Err(Error::no_conv(
            "maximal_step",
            format!("basis of {} modes too small for t_min={t_min}; need {}", basis.len(), required_modes(decay, t_min)),
        ));
    }
    let coeffs = match sys {
        System::Phi => f.coeffs_phi(basis, count)?,
        System::Psi => f.coeffs_psi(basis, count, &SqrtBesselIntegral::new(basis.order()))?,
    };
    let plans: Vec<SupPlan> = grids.iter().map(|g| SupPlan::new(basis, decay, g.times(), count)).collect();
    let modes = plans.iter().map(SupPlan::modes).max().unwrap_or(0);
    let mut sups = vec![vec![NodeSup::default(); out.len()]; grids.len()];
    let mut row = vec![0.0; modes];
    for (i, &x) in out.nodes().iter().enumerate() {
        mode_row(basis, sys, x, &mut row);
        for (r, c) in row.iter_mut().zip(&coeffs) {
            *r *= c;
        }
        let trace = f.eval(x);
        for (g, (plan, s)) in grids.iter().zip(plans.iter().zip(sups.iter_mut())) {
            if g.with_trace() {
                s[i].push(0.0, trace);
            }
            for (t, v) in plan.values(&row) {
                s[i].push(t, v);
            }
        }
    }
    grids
        .iter()
        .zip(&sups)
        .map(|(g, s)| MaximalResult::assemble(kind, g.clone(), Arc::clone(&out), s))
        .collect()
}

/// Single-grid form of `maximal_step_multi` on the default output nodes.
pub fn maximal_step(basis: &EigenBasis, kind: KernelKind, f: &StepFunction, grid: &TimeGrid) -> Result<MaximalResult> {
    let out = step_output_grid(f, basis.order(), kind.tag(), 5)?;
    Ok(maximal_step_multi(basis, kind, f, std::slice::from_ref(grid), out)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::make_quadrature;

    fn basis(nu: f64, n: usize) -> EigenBasis {
        EigenBasis::new(Order::new(nu).unwrap(), n).unwrap()
    }

    fn grid(nu: f64, n: usize, tag: MeasureTag) -> Arc<QuadGrid> {
        Arc::new(make_quadrature(Domain::UnitInterval, n, tag, Order::new(nu).unwrap()).unwrap())
    }

    #[test]
    fn eigenfunctions_decay_exactly() {
        for &nu in &[0.0, 0.5, 2.5] {
            let b = basis(nu, 200);
            let g = grid(nu, 512, MeasureTag::Mu);
            for n in [1, 4, 10] {
                let f = SampledFunction::from_fn(Arc::clone(&g), |x| b.phi(n, x).unwrap());
                for &t in &[0.01, 0.3, 2.0] {
                    let p = apply_poisson(&b, KernelKind::BesselPoisson, &f, t).unwrap();
                    let e = (-t * b.lambda(n)).exp();
                    for (v, w) in p.values().iter().zip(f.values()) {
                        assert!((v - e * w).abs() < 1e-8, "nu={nu} n={n} t={t}");
                    }
                }
            }
        }
    }

    #[test]
    fn half_order_sine_in_lebesgue_form() {
        let b = basis(0.5, 100);
        let g = grid(0.5, 256, MeasureTag::Lebesgue);
        let f = SampledFunction::from_fn(g, |x| 2f64.sqrt() * (std::f64::consts::PI * x).sin());
        let p = apply_poisson(&b, KernelKind::Poisson, &f, 0.7).unwrap();
        let e = (-std::f64::consts::PI * 0.7).exp();
        for (v, w) in p.values().iter().zip(f.values()) {
            assert!((v - e * w).abs() < 1e-10);
        }
    }

    #[test]
    fn mass_is_lost_through_the_boundary() {
        let b = basis(1.0, 200);
        let g = grid(1.0, 512, MeasureTag::Mu);
        let f = SampledFunction::from_fn(g, |x| if (0.3..0.6).contains(&x) { 1.0 } else { 0.2 * x });
        for &t in &[0.05, 0.5, 3.0] {
            let p = apply_poisson(&b, KernelKind::BesselPoisson, &f, t).unwrap();
            assert!(p.integral() < f.l1_norm(), "t={t}");
        }
    }

    #[test]
    fn tag_and_time_errors() {
        let b = basis(0.0, 50);
        let g = grid(0.0, 64, MeasureTag::Lebesgue);
        let f = SampledFunction::zeros(g);
        assert!(matches!(
            apply_poisson(&b, KernelKind::BesselPoisson, &f, 1.0),
            Err(Error::MeasureMismatch { .. })
        ));
        assert!(apply_poisson(&b, KernelKind::Poisson, &f, 0.0).is_err());
        assert_eq!("P-halfline".parse::<KernelKind>().unwrap(), KernelKind::HalfLinePoisson);
    }

    #[test]
    fn maximal_of_first_mode_is_itself() {
        let b = basis(0.5, 200);
        let g = grid(0.5, 256, MeasureTag::Mu);
        let f = SampledFunction::from_fn(g, |x| b.phi(1, x).unwrap());
        let r = maximal_function(&b, KernelKind::BesselPoisson, &f, &TimeGrid::standard()).unwrap();
        let m = r.function();
        for (v, w) in m.values().iter().zip(f.values()) {
            assert!((v - w).abs() < 1e-4);
        }
        let zero = SampledFunction::zeros(Arc::clone(f.grid()));
        let z = maximal_function(&b, KernelKind::BesselPoisson, &zero, &TimeGrid::standard()).unwrap();
        assert_eq!(z.function().sup_norm(), 0.0);
    }

    #[test]
    fn split_parts_recombine() {
        let b = basis(0.0, 200);
        let g = grid(0.0, 256, MeasureTag::Mu);
        let f = SampledFunction::from_fn(g, |x| (x - 0.4) * (1.0 - x));
        let full = maximal_function(&b, KernelKind::BesselPoisson, &f, &TimeGrid::standard()).unwrap();
        let (m0, minf) = split_maximal(&b, KernelKind::BesselPoisson, &f).unwrap();
        for ((a, c), v) in m0.values().iter().zip(minf.values()).zip(full.function().values()) {
            assert_eq!(a.max(*c), *v);
        }
    }

    #[test]
    fn large_time_part_decays_like_first_mode() {
        // |P_t f(x)| <= C (1 - x) e^{-t lambda_1} ||f||_1 for t >= 1
        let b = basis(0.5, 200);
        let g = grid(0.5, 256, MeasureTag::Mu);
        let f = SampledFunction::from_fn(g, |x| if x < 0.3 { 5.0 } else { -1.0 });
        let l1 = f.l1_norm();
        let mut worst: f64 = 0.0;
        for &t in &[1.0, 2.0, 5.0, 10.0] {
            let p = apply_poisson(&b, KernelKind::BesselPoisson, &f, t).unwrap();
            for (x, v) in p.nodes().iter().zip(p.values()) {
                worst = worst.max(v.abs() / ((1.0 - x) * (-t * b.lambda(1)).exp() * l1));
            }
        }
        assert!(worst.is_finite() && worst < 50.0, "{worst}");
    }

    #[test]
    fn step_maximal_refines_monotonically() {
        let nu = 0.5;
        let b = basis(nu, required_modes(Decay::Poisson, 1e-3) + 10);
        let f = StepFunction::new(vec![0.6, 0.65, 0.7], vec![10.0, -10.0]).unwrap();
        let coarse = TimeGrid::span(1e-3, 10.0, 1.25).unwrap();
        let fine = coarse.refined();
        let out = step_output_grid(&f, b.order(), MeasureTag::Mu, 5).unwrap();
        let r = maximal_step_multi(&b, KernelKind::BesselPoisson, &f, &[coarse, fine], out).unwrap();
        let (a, c) = (r[0].function(), r[1].function());
        for (u, v) in a.values().iter().zip(c.values()) {
            assert!(v >= u);
        }
        let gain = (c.l1_norm() - a.l1_norm()) / a.l1_norm();
        assert!(gain < 0.01, "{gain}");
    }

    #[test]
    fn exact_and_quadrature_paths_agree_for_smooth_times() {
        let nu = 1.0;
        let b = basis(nu, 400);
        let f = StepFunction::new(vec![0.2, 0.5, 0.8], vec![1.0, -0.5]).unwrap();
        let grid_t = TimeGrid::span(0.05, 2.0, 1.25).unwrap();
        let out = step_output_grid(&f, b.order(), MeasureTag::Mu, 5).unwrap();
        let exact = maximal_step_multi(&b, KernelKind::BesselPoisson, &f, std::slice::from_ref(&grid_t), Arc::clone(&out))
            .unwrap()
            .remove(0);
        // oracle: direct series kernel against a fine quadrature of the step function
        let (mut ys, mut ws) = crate::basis::mu_rule(b.order(), 0.2, 0.5, 0.01, 16);
        let (y2, w2) = crate::basis::mu_rule(b.order(), 0.5, 0.8, 0.01, 16);
        ys.extend(y2);
        ws.extend(w2);
        for (i, &x) in out.nodes().iter().enumerate().step_by(17) {
            let mut best: f64 = 0.0;
            for &t in grid_t.times() {
                let s: f64 = ys
                    .iter()
                    .zip(&ws)
                    .map(|(&y, &w)| w * f.eval(y) * crate::kernels::poisson_kernel_l(&b, t, x, y).unwrap().value)
                    .sum();
                best = best.max(s.abs());
            }
            let v = exact.function().values()[i];
            assert!((v - best).abs() < 1e-6 * best.max(1.0), "x={x} {v} {best}");
        }
    }
}
