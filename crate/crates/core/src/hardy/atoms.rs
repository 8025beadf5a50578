//! Atoms for the two Hardy spaces, their validation, and the two splittings used to
//! reduce special and wide atoms to local ones.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::cover::{Family, Interval};
use super::decompose::Remainder;
use crate::basis::{MeasureMu, StepFunction};
use crate::error::{Error, Result};
use crate::specfun::Order;

/// Cancellation defect allowed, relative to `||a||_{L^1}`.
pub const CANCEL_TOLERANCE: f64 = 1e-10;
/// Relative slack for the sup-norm and height comparisons.
const ROUNDING: f64 = 1e-12;

/// Measure of `(a, b]` in the family's measure.
pub fn family_measure(family: Family, order: Order, a: f64, b: f64) -> f64 {
    match family {
        Family::I => MeasureMu::new(order).interval(a, b),
        Family::J => b - a,
    }
}

/// Point splitting `(a, b]` into two halves of equal measure.
pub fn measure_median(family: Family, order: Order, a: f64, b: f64) -> f64 {
    match family {
        Family::I => {
            let p = order.mu_exponent();
            if a <= 0.0 {
                return b * 0.5f64.powf(1.0 / p);
            }
            // a ((1 + (b/a)^p) / 2)^{1/p} without cancellation for short intervals
            let grow = (p * ((b - a) / a).ln_1p()).exp_m1();
            a * ((0.5 * grow).ln_1p() / p).exp()
        }
        Family::J => 0.5 * (a + b),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AtomKind {
    Cancellative,
    /// `m(I_j)^{-1} chi_{I_j}` (or the `J` analogue).
    Special,
    /// `m(X)^{-1} chi_X` for a local space `X = I_j**`; only an intermediate object.
    LocalSpecial,
}

/// Concrete profile of an atom.
#[derive(Debug, Clone)]
pub enum Shape {
    /// `m(I)^{-1}` on the whole interval.
    Indicator,
    /// `up` on `(a, mid]`, `-down` on `(mid, b]`, with `up m(a, mid] = down m(mid, b]`
    /// and the larger height equal to `m(I)^{-1}`.
    Haar { mid: f64, up: f64, down: f64 },
    Step(Arc<StepFunction>),
    Remainder(Arc<Remainder>),
}

#[derive(Debug, Clone)]
pub struct Atom {
    pub kind: AtomKind,
    pub family: Family,
    pub order: Order,
    pub interval: Interval,
    /// Cell index for special atoms and for atoms produced inside `I_j**`.
    pub j: Option<i32>,
    pub shape: Shape,
}

impl Atom {
    pub fn special(family: Family, order: Order, j: i32) -> Result<Self> {
        Ok(Atom {
            kind: AtomKind::Special,
            family,
            order,
            interval: family.interval(j)?,
            j: Some(j),
            shape: Shape::Indicator,
        })
    }

    pub fn local_special(family: Family, order: Order, j: i32) -> Result<Self> {
        Ok(Atom {
            kind: AtomKind::LocalSpecial,
            family,
            order,
            interval: family.interval(j)?.stars(2),
            j: Some(j),
            shape: Shape::Indicator,
        })
    }

    pub fn haar(family: Family, order: Order, interval: Interval, j: Option<i32>) -> Self {
        Atom {
            kind: AtomKind::Cancellative,
            family,
            order,
            interval,
            j,
            shape: haar_shape(family, order, interval.a, measure_median(family, order, interval.a, interval.b), interval.b),
        }
    }

    /// A user-supplied piecewise-constant atom claimed to be cancellative on `interval`.
    pub fn from_step(family: Family, order: Order, interval: Interval, f: StepFunction) -> Self {
        Atom {
            kind: AtomKind::Cancellative,
            family,
            order,
            interval,
            j: None,
            shape: Shape::Step(Arc::new(f)),
        }
    }

    pub fn measure(&self) -> f64 {
        family_measure(self.family, self.order, self.interval.a, self.interval.b)
    }

    fn level(&self) -> f64 {
        1.0 / self.measure()
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.shape {
            Shape::Indicator => {
                if self.interval.contains(x) {
                    self.level()
                } else {
                    0.0
                }
            }
            Shape::Haar { mid, up, down } => {
                if !self.interval.contains(x) {
                    0.0
                } else if x <= *mid {
                    *up
                } else {
                    -*down
                }
            }
            Shape::Step(f) => f.eval(x),
            Shape::Remainder(r) => r.eval(x),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match &self.shape {
            Shape::Indicator => self.level(),
            Shape::Haar { up, down, .. } => up.max(*down),
            Shape::Step(f) => f.sup_norm(),
            Shape::Remainder(r) => r.sup_norm(),
        }
    }

    /// Integral against the family's measure.
    pub fn integral(&self) -> f64 {
        let (f, o) = (self.family, self.order);
        match &self.shape {
            Shape::Indicator => 1.0,
            Shape::Haar { mid, up, down } => {
                up * family_measure(f, o, self.interval.a, *mid) - down * family_measure(f, o, *mid, self.interval.b)
            }
            Shape::Step(s) => s.pieces().map(|(a, b, h)| h * family_measure(f, o, a, b)).sum(),
            Shape::Remainder(r) => r.integral(),
        }
    }

    pub fn l1_norm(&self) -> f64 {
        let (f, o) = (self.family, self.order);
        match &self.shape {
            Shape::Indicator => 1.0,
            Shape::Haar { mid, up, down } => {
                up * family_measure(f, o, self.interval.a, *mid) + down * family_measure(f, o, *mid, self.interval.b)
            }
            Shape::Step(s) => s.pieces().map(|(a, b, h)| h.abs() * family_measure(f, o, a, b)).sum(),
            Shape::Remainder(r) => r.l1_norm(),
        }
    }

    /// Closed support hull `[lo, hi]` of the nonzero part.
    pub fn support(&self) -> (f64, f64) {
        match &self.shape {
            Shape::Step(s) => effective_support(s).unwrap_or((self.interval.a, self.interval.a)),
            Shape::Remainder(r) => r.support(),
            _ => (self.interval.a, self.interval.b),
        }
    }

    /// Piecewise-constant form, when the atom has one.
    pub fn to_step(&self) -> Option<StepFunction> {
        let (a, b) = (self.interval.a, self.interval.b);
        match &self.shape {
            Shape::Indicator => StepFunction::indicator(a, b, self.level()).ok(),
            Shape::Haar { mid, up, down } => StepFunction::new(vec![a, *mid, b], vec![*up, -*down]).ok(),
            Shape::Step(s) => Some((**s).clone()),
            Shape::Remainder(_) => None,
        }
    }
}

/// Two-valued cancellative profile on `(a, b]` split at `mid`.
pub fn haar_shape(family: Family, order: Order, a: f64, mid: f64, b: f64) -> Shape {
    let (left, right) = (family_measure(family, order, a, mid), family_measure(family, order, mid, b));
    let top = 1.0 / (left + right);
    let (up, down) = if left <= right {
        (top, top * left / right)
    } else {
        (top * right / left, top)
    };
    Shape::Haar { mid, up, down }
}

/// Hull of the pieces with nonzero height.
pub fn effective_support(s: &StepFunction) -> Option<(f64, f64)> {
    let mut lo = None;
    let mut hi = None;
    for (a, b, h) in s.pieces() {
        if h != 0.0 {
            lo.get_or_insert(a);
            hi = Some(b);
        }
    }
    Some((lo?, hi?))
}

/// Outcome of checking one atom against its definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomReport {
    pub kind: AtomKind,
    pub family: Family,
    pub interval: [f64; 2],
    pub j: Option<i32>,
    pub support_ok: bool,
    pub sup_norm: f64,
    pub sup_bound: f64,
    pub sup_ok: bool,
    /// `|int a dm| / ||a||_{L^1}`; zero for special atoms.
    pub cancellation_defect: f64,
    pub cancel_ok: bool,
    /// For special atoms: the profile is the normalised indicator of the named cell.
    pub shape_ok: bool,
    /// Smallest constant `C` with `C^{-1} a` passing the sup-norm check.
    pub constant: f64,
    pub valid: bool,
}

/// Validates with the sup bound `m(I)^{-1}` exactly.
pub fn validate_atom(atom: &Atom) -> AtomReport {
    validate_atom_with_constant(atom, 1.0)
}

/// Validates with the sup bound relaxed to `c m(I)^{-1}`.
pub fn validate_atom_with_constant(atom: &Atom, c: f64) -> AtomReport {
    let iv = atom.interval;
    let inside_unit = iv.a >= 0.0 && iv.b <= 1.0;
    let (lo, hi) = atom.support();
    let support_ok = inside_unit && lo >= iv.a - 1e-15 && hi <= iv.b + 1e-15;
    let bound = 1.0 / atom.measure();
    let sup = atom.sup_norm();
    let sup_ok = sup <= c * bound * (1.0 + ROUNDING);
    let (defect, cancel_ok, shape_ok) = match atom.kind {
        AtomKind::Cancellative => {
            let l1 = atom.l1_norm();
            let d = if l1 > 0.0 { atom.integral().abs() / l1 } else { 0.0 };
            (d, d < CANCEL_TOLERANCE, true)
        }
        AtomKind::Special | AtomKind::LocalSpecial => {
            let cell = atom.j.and_then(|j| {
                let base = atom.family.interval(j).ok()?;
                Some(if atom.kind == AtomKind::Special { base } else { base.stars(2) })
            });
            let ok = match cell {
                Some(cell) => {
                    let same = (cell.a - iv.a).abs() <= 1e-15 && (cell.b - iv.b).abs() <= 1e-15;
                    same && indicator_profile(atom, bound)
                }
                None => false,
            };
            (0.0, true, ok)
        }
    };
    AtomReport {
        kind: atom.kind,
        family: atom.family,
        interval: [iv.a, iv.b],
        j: atom.j,
        support_ok,
        sup_norm: sup,
        sup_bound: bound,
        sup_ok,
        cancellation_defect: defect,
        cancel_ok,
        shape_ok,
        constant: sup / bound,
        valid: support_ok && sup_ok && cancel_ok && shape_ok,
    }
}

fn indicator_profile(atom: &Atom, level: f64) -> bool {
    match &atom.shape {
        Shape::Indicator => true,
        Shape::Step(s) => s.pieces().all(|(a, b, h)| {
            let inside = a >= atom.interval.a - 1e-15 && b <= atom.interval.b + 1e-15;
            if inside {
                (h - level).abs() <= ROUNDING * level
            } else {
                h == 0.0
            }
        }) && effective_support(s)
            .map(|(lo, hi)| (lo - atom.interval.a).abs() <= 1e-15 && (hi - atom.interval.b).abs() <= 1e-15)
            .unwrap_or(false),
        _ => false,
    }
}

/// `m(I_j)^{-1} chi_{I_j} = lambda1 a1 + a2` with `a2 = m(I_j**)^{-1} chi_{I_j**}` and
/// `a1` cancellative on `I_j**`.
#[derive(Debug, Clone)]
pub struct TwoAtomSplit {
    pub input: Atom,
    pub lambda1: f64,
    pub a1: Atom,
    pub a2: Atom,
}

pub fn two_atom_split(family: Family, order: Order, j: i32) -> Result<TwoAtomSplit> {
    let input = Atom::special(family, order, j)?;
    let a2 = Atom::local_special(family, order, j)?;
    let (cell, wide) = (input.interval, a2.interval);
    let (mc, mw) = (input.measure(), a2.measure());
    let inner = 1.0 / mc - 1.0 / mw;
    let outer = -1.0 / mw;
    let lambda1 = inner.abs().max(outer.abs()) * mw;
    let mut breaks = Vec::new();
    let mut heights = Vec::new();
    if wide.a < cell.a {
        breaks.push(wide.a);
        heights.push(outer / lambda1);
    }
    breaks.push(cell.a);
    heights.push(inner / lambda1);
    breaks.push(cell.b);
    if cell.b < wide.b {
        heights.push(outer / lambda1);
        breaks.push(wide.b);
    }
    let a1 = Atom {
        kind: AtomKind::Cancellative,
        family,
        order,
        interval: wide,
        j: Some(j),
        shape: Shape::Step(Arc::new(StepFunction::new(breaks, heights)?)),
    };
    Ok(TwoAtomSplit { input, lambda1, a1, a2 })
}

/// One piece `b_j = 2^{j-N} a chi_{I_j}` of the wide-atom splitting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Case3Piece {
    pub j: i32,
    pub coefficient: f64,
    pub piece: StepFunction,
    /// `||b_j||_inf mu(I_j*)`, bounded by a fixed constant.
    pub normalised_sup: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Case3Split {
    pub n: i32,
    pub m: i32,
    pub pieces: Vec<Case3Piece>,
    pub coefficient_sum: f64,
}

fn first_cell(family: Family, x: f64) -> Result<i32> {
    if x <= 0.0 {
        return Ok(0);
    }
    let j = family.index_of(x)?;
    Ok(if family.interval(j)?.b <= x { family.next(j) } else { j })
}

/// Splits a cancellative `I`-family atom whose support fits in no single `I_j*` into
/// `sum_{j=N}^{M} 2^{N-j} b_j`.
pub fn case3_split(atom: &Atom) -> Result<Case3Split> {
    if atom.family != Family::I {
        return Err(Error::invalid("the wide-atom splitting is defined for the I family"));
    }
    if atom.kind != AtomKind::Cancellative {
        return Err(Error::invalid("the wide-atom splitting takes a cancellative atom"));
    }
    let step = atom
        .to_step()
        .ok_or_else(|| Error::invalid("the wide-atom splitting needs a piecewise-constant atom"))?;
    let (lo, hi) = effective_support(&step).ok_or_else(|| Error::invalid("atom is identically zero"))?;
    let n = first_cell(Family::I, lo)?;
    let m = Family::I.index_of(hi)?;
    for j in (n - 1).max(0)..=m + 1 {
        let s = Family::I.interval(j)?.star();
        if s.a <= lo && hi <= s.b {
            return Err(Error::invalid(format!("support fits inside I_{j}* = {s}")));
        }
    }
    let order = atom.order;
    let mut pieces = Vec::new();
    for j in n..=m {
        let cell = Family::I.interval(j)?;
        let scale = 2f64.powi(j - n);
        let mut breaks = vec![cell.a];
        let mut heights = Vec::new();
        for (a, b, h) in step.pieces() {
            let (pa, pb) = (a.max(cell.a), b.min(cell.b));
            if pb > pa {
                if pa > *breaks.last().unwrap() {
                    heights.push(0.0);
                    breaks.push(pa);
                }
                heights.push(h * scale);
                breaks.push(pb);
            }
        }
        if *breaks.last().unwrap() < cell.b {
            heights.push(0.0);
            breaks.push(cell.b);
        }
        let piece = StepFunction::new(breaks, heights)?;
        let normalised_sup = piece.sup_norm() * cell.star().mu(order);
        pieces.push(Case3Piece {
            j,
            coefficient: 1.0 / scale,
            piece,
            normalised_sup,
        });
    }
    let coefficient_sum = pieces.iter().map(|p| p.coefficient).sum();
    Ok(Case3Split {
        n,
        m,
        pieces,
        coefficient_sum,
    })
}
