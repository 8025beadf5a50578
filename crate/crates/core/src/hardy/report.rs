//! Maximal-function norm against the atomic norm of one decomposition.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::atoms::{effective_support, Atom};
use super::cover::Family;
use super::decompose::{atomic_decompose, Source, DEFAULT_DEPTH, MAX_DEPTH};
use crate::basis::{make_quadrature, Domain, EigenBasis, MeasureTag, SampledFunction};
use crate::error::{Error, Result};
use crate::maximal::{maximal_function, maximal_step, KernelKind, TimeGrid};
use crate::specfun::Order;

/// Semigroup whose maximal function defines the Hardy space of `family`.
pub fn family_kernel(family: Family) -> KernelKind {
    match family {
        Family::I => KernelKind::BesselPoisson,
        Family::J => KernelKind::Poisson,
    }
}

fn family_tag(family: Family) -> MeasureTag {
    match family {
        Family::I => MeasureTag::Mu,
        Family::J => MeasureTag::Lebesgue,
    }
}

/// Built-in test inputs: `phi1`, `psi1`, `quadratic` (`x(1-x)`) and `bump`
/// (a smooth bump of radius `2^-5` centred at 0.3).
pub fn named_source(name: &str, order: Order) -> Result<Source> {
    match name {
        "phi1" | "psi1" => {
            let b = EigenBasis::new(order, 1)?;
            let phi = name == "phi1";
            Ok(Source::smooth(name, move |x| {
                let v = if phi { b.phi(1, x) } else { b.psi(1, x) };
                v.unwrap_or(0.0)
            }))
        }
        "quadratic" | "x(1-x)" => Ok(Source::smooth("quadratic", |x| x * (1.0 - x))),
        "bump" => Ok(Source::smooth("bump", |x: f64| {
            let u = (x - 0.3) * 32.0;
            if u.abs() < 1.0 {
                (-1.0 / (1.0 - u * u)).exp()
            } else {
                0.0
            }
        })),
        _ => Err(Error::invalid(format!("unknown function '{name}' (phi1, psi1, quadratic, bump)"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct H1Config {
    pub depth: u32,
    /// Sample count for smooth inputs.
    pub sample_nodes: usize,
}

impl Default for H1Config {
    fn default() -> Self {
        H1Config {
            depth: DEFAULT_DEPTH,
            sample_nodes: 2048,
        }
    }
}

impl H1Config {
    pub fn refined(&self) -> Self {
        H1Config {
            depth: (self.depth + 2).min(MAX_DEPTH),
            sample_nodes: 2 * self.sample_nodes,
        }
    }
}

/// `||sup_t |e^{-t A} f| ||_{L^1}` for the family's semigroup and measure.
pub fn maximal_norm(basis: &EigenBasis, source: &Source, family: Family, grid: &TimeGrid, sample_nodes: usize) -> Result<f64> {
    let kind = family_kernel(family);
    match source {
        Source::Step(s) if effective_support(s).is_none() => Ok(0.0),
        Source::Step(s) => Ok(maximal_step(basis, kind, s, grid)?.l1_norm()),
        Source::Smooth { f, .. } => {
            let q = make_quadrature(Domain::UnitInterval, sample_nodes, family_tag(family), basis.order())?;
            let g = SampledFunction::from_fn(Arc::new(q), |x| f(x));
            Ok(maximal_function(basis, kind, &g, grid)?.l1_norm())
        }
    }
}

/// Maximal norm of a piecewise-constant atom.
pub fn atom_maximal_norm(basis: &EigenBasis, atom: &Atom, grid: &TimeGrid) -> Result<f64> {
    let s = atom
        .to_step()
        .ok_or_else(|| Error::invalid("maximal norm of an atom needs a piecewise-constant profile"))?;
    Ok(maximal_step(basis, family_kernel(atom.family), &s, grid)?.l1_norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct H1Point {
    pub maximal_norm: f64,
    pub atomic_norm_upper: f64,
    pub ratio: f64,
    pub reconstruction_l1_error: f64,
    pub atoms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H1Report {
    pub function: String,
    pub family: Family,
    pub nu: f64,
    pub maximal_norm: f64,
    pub atomic_norm_upper: f64,
    /// `atomic_norm_upper / maximal_norm`; 0 for the zero function.
    pub ratio: f64,
    pub reconstruction_l1_error: f64,
    pub refined: H1Point,
    pub relative_change: f64,
    pub config: H1Config,
}

fn point(basis: &EigenBasis, source: &Source, family: Family, grid: &TimeGrid, cfg: &H1Config) -> Result<H1Point> {
    let m = maximal_norm(basis, source, family, grid, cfg.sample_nodes)?;
    let d = atomic_decompose(source, family, basis.order(), cfg.depth)?;
    Ok(H1Point {
        maximal_norm: m,
        atomic_norm_upper: d.sum_abs_coeff,
        ratio: if m > 0.0 { d.sum_abs_coeff / m } else { 0.0 },
        reconstruction_l1_error: d.reconstruction_l1_error,
        atoms: d.atoms.len(),
    })
}

/// Both norms at the given settings and again with a finer time grid, denser
/// sampling and a deeper cascade.
pub fn h1_norm_report(basis: &EigenBasis, source: &Source, family: Family, cfg: H1Config) -> Result<H1Report> {
    let grid = TimeGrid::standard();
    let base = point(basis, source, family, &grid, &cfg)?;
    let fine_cfg = cfg.refined();
    let refined = point(basis, source, family, &grid.refined(), &fine_cfg)?;
    let relative_change = if base.ratio > 0.0 {
        (refined.ratio - base.ratio).abs() / base.ratio
    } else {
        0.0
    };
    Ok(H1Report {
        function: source.name(),
        family,
        nu: basis.order().value(),
        maximal_norm: base.maximal_norm,
        atomic_norm_upper: base.atomic_norm_upper,
        ratio: base.ratio,
        reconstruction_l1_error: base.reconstruction_l1_error,
        refined,
        relative_change,
        config: cfg,
    })
}
