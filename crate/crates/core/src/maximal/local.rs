//! Localisation checks for the small-time maximal operator near one dyadic cell:
//! the part of `M0 f` living off `I_j**` for inputs on `I_j*`, and the sup over
//! `mu(I_j**) < t < 1` restricted to `I_j**`.

use serde::{Deserialize, Serialize};

use super::engine::{maximal_step_multi, step_output_grid, KernelKind};
use super::timegrid::{TimeGrid, DEFAULT_RATIO};
use crate::basis::{EigenBasis, MeasureTag, StepFunction};
use crate::error::{Error, Result};
use crate::hardy::{Family, Interval};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalRatio {
    pub j: i32,
    pub ratio: f64,
    pub input_norm: f64,
    pub nodes: usize,
}

fn within(f: &StepFunction, iv: &Interval) -> bool {
    let (a, b) = f.support();
    a >= iv.a - 1e-15 && b <= iv.b + 1e-15
}

/// `f` padded with zero pieces so that `iv`'s ends become output breakpoints.
fn padded(f: &StepFunction, iv: &Interval) -> Result<StepFunction> {
    let mut breaks = Vec::new();
    let mut heights = Vec::new();
    if iv.a < f.breaks()[0] {
        breaks.push(iv.a);
        heights.push(0.0);
    }
    breaks.extend_from_slice(f.breaks());
    heights.extend_from_slice(f.heights());
    if iv.b > *breaks.last().unwrap() {
        breaks.push(iv.b);
        heights.push(0.0);
    }
    StepFunction::new(breaks, heights)
}

fn run(
    basis: &EigenBasis,
    f: &StepFunction,
    iv: &Interval,
    grid: &TimeGrid,
    inside: bool,
    j: i32,
) -> Result<LocalRatio> {
    let order = basis.order();
    let norm = f.l1_mu(order);
    let out = step_output_grid(&padded(f, iv)?, order, MeasureTag::Mu, 5)?;
    let nodes = out.len();
    if norm == 0.0 {
        return Ok(LocalRatio {
            j,
            ratio: 0.0,
            input_norm: 0.0,
            nodes,
        });
    }
    let res = maximal_step_multi(basis, KernelKind::BesselPoisson, f, std::slice::from_ref(grid), out)?.remove(0);
    let s = &res.small;
    let mass: f64 = s
        .nodes()
        .iter()
        .zip(s.weights())
        .zip(s.values())
        .filter(|((&x, _), _)| (x > iv.a && x <= iv.b) == inside)
        .map(|((_, w), v)| w * v)
        .sum();
    Ok(LocalRatio {
        j,
        ratio: mass / norm,
        input_norm: norm,
        nodes,
    })
}

/// `int_{(I_j**)^c} M0 f dmu / ||f||_{L^1(mu)}` for `f` supported in `I_j*`.
pub fn local_tail_ratio(basis: &EigenBasis, j: i32, f: &StepFunction) -> Result<LocalRatio> {
    let cell = Family::I.interval(j)?;
    if !within(f, &cell.star()) {
        return Err(Error::invalid(format!("input must be supported in {}", cell.star())));
    }
    run(basis, f, &cell.stars(2), &TimeGrid::standard(), false, j)
}

/// `|| sup_{mu(I_j**) < t < 1} |calP_t f| ||_{L^1(I_j**, mu)} / ||f||` for `f` supported in `I_j**`.
pub fn restricted_sup_ratio(basis: &EigenBasis, j: i32, f: &StepFunction) -> Result<LocalRatio> {
    let iv = Family::I.interval(j)?.stars(2);
    if !within(f, &iv) {
        return Err(Error::invalid(format!("input must be supported in {iv}")));
    }
    let grid = TimeGrid::span(iv.mu(basis.order()), 1.0, DEFAULT_RATIO)?;
    run(basis, f, &iv, &grid, true, j)
}

/// Narrow bars of width `|iv| / 32` at the left end, middle and right end of `iv`,
/// plus the full indicator; each normalised in `L^1(mu)`.
pub fn probe_inputs(iv: &Interval, order: crate::specfun::Order) -> Result<Vec<StepFunction>> {
    let w = iv.len() / 32.0;
    let spots = [(iv.a, iv.a + w), (iv.center() - 0.5 * w, iv.center() + 0.5 * w), (iv.b - w, iv.b), (iv.a, iv.b)];
    spots
        .iter()
        .map(|&(a, b)| {
            let g = StepFunction::indicator(a, b, 1.0)?;
            Ok(g.scaled(1.0 / g.l1_mu(order)))
        })
        .collect()
}
