//! Constructive atomic decompositions: a measure-adapted Haar cascade on each local
//! space `I_j**` (or `J_j**`), glued over the partition of unity.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::atoms::{
    effective_support, family_measure, haar_shape, measure_median, two_atom_split, Atom, AtomKind, Shape,
};
use super::cover::{Family, Interval};
use super::partition::{build_partition, PartitionOfUnity};
use crate::basis::StepFunction;
use crate::error::{Error, Result};
use crate::quadrature::{push_panel, two_sided_breaks};
use crate::specfun::Order;

pub const RECONSTRUCT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_DEPTH: u32 = 12;
pub const MAX_DEPTH: u32 = 16;
/// Pieces `eta_j f` are added until the uncovered mass drops below this fraction.
const TAIL_TOLERANCE: f64 = 1e-10;
/// Farthest cell index visited.
const MAX_CELL: i32 = 48;
const MEAN_NODES: usize = 16;
const CHECK_NODES: usize = 20;
/// Haar terms below this fraction of the local mass are rounding noise.
const DROP: f64 = 1e-13;
/// Smallest cell width, in units of the float spacing, that keeps the remainder's
/// cancellation certifiable.
const RESOLVABLE: f64 = 1e11;
/// Head room on the sampled sup of the remainder.
const SUP_SAFETY: f64 = 1e-3;

/// Function being decomposed.
#[derive(Clone)]
pub enum Source {
    Step(StepFunction),
    Smooth {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Step(s) => f.debug_tuple("Step").field(s).finish(),
            Source::Smooth { name, .. } => f.debug_struct("Smooth").field("name", name).finish(),
        }
    }
}

impl Source {
    pub fn smooth(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Source::Smooth {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Source::Step(_) => "step".into(),
            Source::Smooth { name, .. } => name.clone(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Source::Step(s) => s.eval(x),
            Source::Smooth { f, .. } => f(x),
        }
    }

    pub fn scaled(&self, c: f64) -> Source {
        match self {
            Source::Step(s) => Source::Step(s.scaled(c)),
            Source::Smooth { name, f } => {
                let f = Arc::clone(f);
                Source::smooth(format!("{c}*{name}"), move |x| c * f(x))
            }
        }
    }

    fn breaks(&self) -> &[f64] {
        match self {
            Source::Step(s) => s.breaks(),
            Source::Smooth { .. } => &[],
        }
    }

    /// Closed hull outside which the source vanishes.
    fn hull(&self) -> Option<(f64, f64)> {
        match self {
            Source::Step(s) => effective_support(s),
            Source::Smooth { .. } => Some((0.0, 1.0)),
        }
    }
}

/// Localising weight applied to the source.
#[derive(Debug, Clone, Copy)]
enum Weight {
    Eta(PartitionOfUnity, i32),
    Indicator(Interval),
}

impl Weight {
    fn eval(&self, x: f64) -> f64 {
        match self {
            Weight::Eta(p, j) => p.eta(*j, x),
            Weight::Indicator(iv) => {
                if iv.contains(x) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    fn edges(&self) -> Vec<f64> {
        match self {
            Weight::Eta(p, j) => {
                let (a, b) = p.support(*j).expect("valid index");
                let (c, d) = p.plateau(*j).expect("valid index");
                vec![a, b, c, d]
            }
            Weight::Indicator(iv) => vec![iv.a, iv.b],
        }
    }
}

/// Quadrature panels on `[a, b]` split at the source's breaks and the weight's
/// edges; geometric toward 0 when the measure is `mu` and `a = 0`.
fn cell_rule(source: &Source, weight: &Weight, family: Family, order: Order, a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut cuts = vec![a, b];
    let br = source.breaks();
    let lo = br.partition_point(|&x| x <= a);
    let hi = br.partition_point(|&x| x < b);
    cuts.extend_from_slice(&br[lo..hi]);
    cuts.extend(weight.edges().into_iter().filter(|&e| e > a && e < b));
    if a == 0.0 && family == Family::I {
        let first = cuts.iter().copied().filter(|&c| c > 0.0).fold(b, f64::min);
        cuts.extend((1..=40).map(|k| first * 0.5f64.powi(k)));
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let p1 = 2.0 * order.value() + 1.0;
    let (mut xs, mut ws) = (Vec::new(), Vec::new());
    for w in cuts.windows(2) {
        push_panel(&mut xs, &mut ws, w[0], w[1], n);
    }
    if family == Family::I {
        for (x, w) in xs.iter().zip(ws.iter_mut()) {
            *w *= x.powf(p1);
        }
    }
    (xs, ws)
}

/// Fine-scale part `w f - E_D(w f)` of one local piece, normalised into an atom.
pub struct Remainder {
    source: Source,
    weight: Weight,
    family: Family,
    order: Order,
    cells: Vec<f64>,
    means: Vec<f64>,
    /// The atom is `(w f - mean) / scale`.
    scale: f64,
}

impl fmt::Debug for Remainder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Remainder")
            .field("source", &self.source)
            .field("cells", &(self.cells.len() - 1))
            .field("scale", &self.scale)
            .finish()
    }
}

impl Remainder {
    fn raw(&self, x: f64) -> f64 {
        let n = self.cells.len() - 1;
        if !(x > self.cells[0] && x <= self.cells[n]) {
            return 0.0;
        }
        let k = (self.cells.partition_point(|&c| c < x) - 1).min(n - 1);
        self.weight.eval(x) * self.source.eval(x) - self.means[k]
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.raw(x) / self.scale
    }

    /// Cell-wise integrals of `h(atom)` with a denser rule than the one that built it.
    fn check_sum(&self, h: impl Fn(f64) -> f64) -> f64 {
        self.cells
            .windows(2)
            .map(|w| {
                let (xs, ws) = cell_rule(&self.source, &self.weight, self.family, self.order, w[0], w[1], CHECK_NODES);
                xs.iter().zip(&ws).map(|(&x, &wt)| wt * h(self.eval(x))).sum::<f64>()
            })
            .sum()
    }

    pub fn integral(&self) -> f64 {
        self.check_sum(|v| v)
    }

    pub fn l1_norm(&self) -> f64 {
        self.check_sum(f64::abs)
    }

    /// Sup sampled on the denser rule plus both one-sided cell ends.
    pub fn sup_norm(&self) -> f64 {
        let mut m = 0.0f64;
        for w in self.cells.windows(2) {
            let (xs, _) = cell_rule(&self.source, &self.weight, self.family, self.order, w[0], w[1], CHECK_NODES);
            for x in xs.into_iter().chain([w[0].next_up(), w[1]]) {
                m = m.max(self.eval(x).abs());
            }
        }
        m
    }

    pub fn support(&self) -> (f64, f64) {
        (self.cells[0], *self.cells.last().unwrap())
    }
}

/// Edges of `2^depth` cells of equal measure, by repeated median splitting.
fn cell_edges(family: Family, order: Order, x: Interval, depth: u32) -> Vec<f64> {
    let mut edges = vec![x.a, x.b];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(2 * edges.len() - 1);
        for w in edges.windows(2) {
            next.push(w[0]);
            next.push(measure_median(family, order, w[0], w[1]));
        }
        next.push(*edges.last().unwrap());
        edges = next;
    }
    edges
}

/// Output of one local cascade before post-processing.
struct Local {
    mass: f64,
    terms: Vec<(f64, Atom)>,
}

fn cascade(source: &Source, weight: Weight, family: Family, order: Order, j: i32, depth: u32) -> Result<Local> {
    let x = family.interval(j)?.stars(2);
    // finest cells must stay wide against the float spacing near x.b, or the
    // remainder's cancellation drowns in rounding of the quadrature nodes
    let resolution = x.len() / (RESOLVABLE * (x.b.next_up() - x.b));
    let resolvable = resolution >= 1.0;
    let depth = if resolvable { depth.min(resolution.log2().floor() as u32) } else { 0 };
    let edges = cell_edges(family, order, x, depth);
    let n = edges.len() - 1;
    let mut means = Vec::with_capacity(n);
    let mut masses = Vec::with_capacity(n);
    let mut sampled_sup = (0.0f64, 1.0f64);
    for w in edges.windows(2) {
        let (xs, ws) = cell_rule(source, &weight, family, order, w[0], w[1], MEAN_NODES);
        let vals: Vec<f64> = xs.iter().map(|&t| weight.eval(t) * source.eval(t)).collect();
        let q: f64 = vals.iter().zip(&ws).map(|(v, w)| v * w).sum();
        let m = family_measure(family, order, w[0], w[1]);
        let mean = q / m;
        let ends = [w[0].next_up(), w[1]].map(|t| weight.eval(t) * source.eval(t));
        for &v in vals.iter().chain(ends.iter()) {
            let r = v - mean;
            if r.abs() > sampled_sup.0 {
                sampled_sup = (r.abs(), r.signum());
            }
        }
        means.push(mean);
        masses.push(m);
    }
    let local_l1: f64 = means.iter().zip(&masses).map(|(e, m)| e.abs() * m).sum();
    let mut mass: f64 = means.iter().zip(&masses).map(|(e, m)| e * m).sum();
    if mass.abs() <= DROP * local_l1 {
        mass = 0.0;
    }
    let mut terms = Vec::new();
    // (mean, measure) per node, finest level first
    let mut levels: Vec<Vec<(f64, f64)>> = vec![means.iter().copied().zip(masses.iter().copied()).collect()];
    while levels.last().unwrap().len() > 1 {
        let up = levels
            .last()
            .unwrap()
            .chunks(2)
            .map(|c| {
                let m = c[0].1 + c[1].1;
                ((c[0].0 * c[0].1 + c[1].0 * c[1].1) / m, m)
            })
            .collect();
        levels.push(up);
    }
    levels.reverse();
    // coarse to fine, left to right
    for (lvl, children) in levels.iter().skip(1).enumerate() {
        let span = n >> (lvl + 1);
        for (k, pair) in children.chunks(2).enumerate() {
            let ((el, ml), (er, mr)) = (pair[0], pair[1]);
            let lambda = ml.max(mr) * (el - er);
            if lambda.abs() <= DROP * local_l1 {
                continue;
            }
            let a = edges[2 * k * span];
            let mid = edges[(2 * k + 1) * span];
            let b = edges[2 * (k + 1) * span];
            let atom = Atom {
                kind: AtomKind::Cancellative,
                family,
                order,
                interval: Interval::new(a, b)?,
                j: Some(j),
                shape: haar_shape(family, order, a, mid, b),
            };
            terms.push((lambda, atom));
        }
    }
    let sigma_x = family_measure(family, order, x.a, x.b);
    let peak = means.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if resolvable && sampled_sup.0 > DROP * peak.max(f64::MIN_POSITIVE) {
        let scale = sampled_sup.0 * (1.0 + SUP_SAFETY) * sampled_sup.1;
        let atom = Atom {
            kind: AtomKind::Cancellative,
            family,
            order,
            interval: x,
            j: Some(j),
            shape: Shape::Remainder(Arc::new(Remainder {
                source: source.clone(),
                weight,
                family,
                order,
                cells: edges,
                means,
                scale: scale * sigma_x,
            })),
        };
        terms.push((scale * sigma_x, atom));
    }
    Ok(Local { mass, terms })
}

/// Atoms, coefficients and the measured reconstruction error of one decomposition.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub family: Family,
    pub nu: f64,
    pub depth: u32,
    pub atoms: Vec<Atom>,
    pub coefficients: Vec<f64>,
    pub sum_abs_coeff: f64,
    /// `||f - sum lambda a||_{L^1} / ||f||_{L^1}` on an independent grid.
    pub reconstruction_l1_error: f64,
    pub input_l1_norm: f64,
    /// Cell indices whose pieces were decomposed.
    pub cells: Vec<i32>,
}

#[derive(Serialize, Deserialize)]
struct AtomJson {
    kind: AtomKind,
    interval: [f64; 2],
    j: Option<i32>,
    height: f64,
}

impl Decomposition {
    pub fn eval(&self, x: f64) -> f64 {
        self.atoms.iter().zip(&self.coefficients).map(|(a, c)| c * a.eval(x)).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let atoms: Vec<AtomJson> = self
            .atoms
            .iter()
            .map(|a| AtomJson {
                kind: a.kind,
                interval: [a.interval.a, a.interval.b],
                j: a.j,
                height: a.sup_norm(),
            })
            .collect();
        json!({
            "family": self.family.name(),
            "nu": self.nu,
            "depth": self.depth,
            "atoms": atoms,
            "coefficients": self.coefficients,
            "sum_abs_coeff": self.sum_abs_coeff,
            "reconstruction_l1_error": self.reconstruction_l1_error,
        })
    }
}

/// Mass of `|f|` in the family's measure over `[a, b]`.
fn source_mass(source: &Source, family: Family, order: Order, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let weight = Weight::Indicator(Interval { a: 0.0, b: 1.0 });
    let breaks = two_sided_breaks(a, b, 1e-14_f64.max((b - a) * 1e-12), 2.0, (b - a) / 64.0);
    breaks
        .windows(2)
        .map(|w| {
            let (xs, ws) = cell_rule(source, &weight, family, order, w[0], w[1], MEAN_NODES);
            xs.iter().zip(&ws).map(|(&x, &wt)| wt * source.eval(x).abs()).sum::<f64>()
        })
        .sum()
}

/// Relative L1 error of `sum c a` against `target` on a graded Gauss grid over `[lo, hi]`.
fn reconstruction_error(
    target: impl Fn(f64) -> f64,
    atoms: &[Atom],
    coeffs: &[f64],
    family: Family,
    order: Order,
    lo: f64,
    hi: f64,
) -> (f64, f64) {
    let breaks = two_sided_breaks(lo, hi, 1e-9, 1.5, (hi - lo) / 256.0);
    let (mut xs, mut ws) = (Vec::new(), Vec::new());
    for w in breaks.windows(2) {
        push_panel(&mut xs, &mut ws, w[0], w[1], 6);
    }
    let p1 = 2.0 * order.value() + 1.0;
    if family == Family::I {
        for (x, w) in xs.iter().zip(ws.iter_mut()) {
            *w *= x.powf(p1);
        }
    }
    let mut sum = vec![0.0; xs.len()];
    for (a, &c) in atoms.iter().zip(coeffs) {
        let i0 = xs.partition_point(|&x| x <= a.interval.a);
        let i1 = xs.partition_point(|&x| x <= a.interval.b);
        for i in i0..i1 {
            sum[i] += c * a.eval(xs[i]);
        }
    }
    let mut err = 0.0;
    let mut norm = 0.0;
    for ((&x, &w), s) in xs.iter().zip(&ws).zip(&sum) {
        let f = target(x);
        err += w * (f - s).abs();
        norm += w * f.abs();
    }
    (if norm > 0.0 { err / norm } else { err }, norm)
}

fn check_depth(depth: u32) -> Result<()> {
    if !(1..=MAX_DEPTH).contains(&depth) {
        return Err(Error::invalid(format!("cascade depth must lie in 1..={MAX_DEPTH}")));
    }
    Ok(())
}

fn finish(
    family: Family,
    order: Order,
    depth: u32,
    atoms: Vec<Atom>,
    coefficients: Vec<f64>,
    cells: Vec<i32>,
    target: impl Fn(f64) -> f64,
    domain: (f64, f64),
) -> Decomposition {
    let (err, norm) = reconstruction_error(target, &atoms, &coefficients, family, order, domain.0, domain.1);
    Decomposition {
        family,
        nu: order.value(),
        depth,
        sum_abs_coeff: coefficients.iter().map(|c| c.abs()).sum(),
        atoms,
        coefficients,
        reconstruction_l1_error: err,
        input_l1_norm: norm,
        cells,
    }
}

/// Decomposition of `f chi_X` on the local space `X = I_j**` (or `J_j**`) into the
/// local special atom `m(X)^{-1} chi_X` and cancellative atoms inside `X`.
pub fn local_atomic_decompose(source: &Source, family: Family, order: Order, j: i32, depth: u32) -> Result<Decomposition> {
    check_depth(depth)?;
    let x = family.interval(j)?.stars(2);
    let local = cascade(source, Weight::Indicator(x), family, order, j, depth)?;
    let (mut atoms, mut coeffs) = (Vec::new(), Vec::new());
    if local.mass != 0.0 {
        atoms.push(Atom::local_special(family, order, j)?);
        coeffs.push(local.mass);
    }
    for (c, a) in local.terms {
        coeffs.push(c);
        atoms.push(a);
    }
    let target = |t: f64| if x.contains(t) { source.eval(t) } else { 0.0 };
    Ok(finish(family, order, depth, atoms, coeffs, vec![j], target, (x.a, x.b)))
}

/// Cells in emission order, nearest the middle first, stopping once the uncovered
/// mass is negligible.
fn visit_order(source: &Source, family: Family, order: Order, partition: &PartitionOfUnity, total: f64) -> Result<Vec<i32>> {
    let hull = source.hull();
    let mut out = Vec::new();
    let Some((lo, hi)) = hull else {
        return Ok(out);
    };
    let touches = |j: i32| -> Result<bool> {
        let (a, b) = partition.support(j)?;
        Ok(a < hi && b > lo)
    };
    let limit = TAIL_TOLERANCE * total;
    let mut right_open = true;
    let mut left_open = family == Family::J;
    for step in 1..=MAX_CELL {
        let (left, right) = match family {
            Family::I => (None, step - 1),
            Family::J => (Some(-step), step),
        };
        if left_open {
            let j = left.expect("two-sided family");
            if touches(j)? {
                out.push(j);
            }
            let edge = partition.plateau(j)?.0;
            left_open = edge > lo && source_mass(source, family, order, 0.0, edge.min(hi)) > limit;
        }
        if right_open {
            if touches(right)? {
                out.push(right);
            }
            let edge = partition.plateau(right)?.1;
            right_open = edge < hi && source_mass(source, family, order, edge.max(lo), 1.0) > limit;
        }
        if !left_open && !right_open {
            break;
        }
    }
    Ok(out)
}

/// `f = sum_j eta_j f`, each piece decomposed on its local space and the local
/// special atom traded for a global special atom plus one cancellative atom.
pub fn atomic_decompose(source: &Source, family: Family, order: Order, depth: u32) -> Result<Decomposition> {
    check_depth(depth)?;
    let partition = build_partition(family);
    let total = source_mass(source, family, order, 0.0, 1.0);
    if !total.is_finite() {
        return Err(Error::invalid("input is not integrable"));
    }
    let cells = if total > 0.0 {
        visit_order(source, family, order, &partition, total)?
    } else {
        Vec::new()
    };
    let (mut atoms, mut coeffs) = (Vec::new(), Vec::new());
    for &j in &cells {
        let local = cascade(source, Weight::Eta(partition, j), family, order, j, depth)?;
        if local.mass != 0.0 {
            let split = two_atom_split(family, order, j)?;
            atoms.push(split.input);
            coeffs.push(local.mass);
            atoms.push(split.a1);
            coeffs.push(-local.mass * split.lambda1);
        }
        for (c, a) in local.terms {
            coeffs.push(c);
            atoms.push(a);
        }
    }
    Ok(finish(family, order, depth, atoms, coeffs, cells, |t| source.eval(t), (0.0, 1.0)))
}

/// Largest constant `C` any atom needs, and whether all pass the other checks.
pub fn atom_constant(d: &Decomposition) -> (f64, bool) {
    let mut c = 0.0f64;
    let mut ok = true;
    for a in &d.atoms {
        let r = super::atoms::validate_atom_with_constant(a, f64::INFINITY);
        c = c.max(r.constant);
        ok &= r.valid;
    }
    (c, ok)
}
