//! Grid sweeps comparing kernels with their two-sided profiles or one-sided bounds.

use std::collections::HashMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::halfline::{dz_heat_log, heat_log};
use super::series::{terms_for, Decay};
use crate::basis::{EigenBasis, MeasureMu};
use crate::error::{Error, Result};

/// Exponent constant in Gaussian bounds.
pub const GAUSS_C: f64 = 0.2;
/// Relative accuracy demanded from series evaluations against the comparand.
const RELATIVE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EstimateKind {
    /// Two-sided profile of the measure-form Poisson kernel (both time branches).
    SharpBesselPoisson,
    /// Two-sided profile of the Lebesgue-form Poisson kernel.
    SharpPoisson,
    /// Upper bound on the `x`-derivative of the measure-form Poisson kernel.
    GradBesselPoisson,
    /// Upper bound on the first-order factor applied to the Lebesgue-form kernel.
    DeltaPoisson,
    /// Upper bound on the `y`-derivative of the Lebesgue-form kernel.
    DyPoisson,
    /// Gaussian upper bound on the half-line heat kernel.
    HeatHalfline,
    /// Gaussian upper bound on its `y`-derivative.
    HeatHalflineGrad,
    /// Gaussian upper bound on the heat kernel on `(0, 1)`, `t < 1`.
    HeatBesselUpper,
    /// Two-sided large-time profile of the heat kernel on `(0, 1)`.
    HeatBesselLarge,
}

pub const ALL_ESTIMATES: [EstimateKind; 9] = [
    EstimateKind::SharpBesselPoisson,
    EstimateKind::SharpPoisson,
    EstimateKind::GradBesselPoisson,
    EstimateKind::DeltaPoisson,
    EstimateKind::DyPoisson,
    EstimateKind::HeatHalfline,
    EstimateKind::HeatHalflineGrad,
    EstimateKind::HeatBesselUpper,
    EstimateKind::HeatBesselLarge,
];

impl EstimateKind {
    pub fn id(self) -> &'static str {
        match self {
            EstimateKind::SharpBesselPoisson => "sharp-calP",
            EstimateKind::SharpPoisson => "sharp-P",
            EstimateKind::GradBesselPoisson => "grad-calP",
            EstimateKind::DeltaPoisson => "delta-P",
            EstimateKind::DyPoisson => "dy-P",
            EstimateKind::HeatHalfline => "heat-halfline",
            EstimateKind::HeatHalflineGrad => "heat-halfline-grad",
            EstimateKind::HeatBesselUpper => "heat-L-upper",
            EstimateKind::HeatBesselLarge => "heat-L-large",
        }
    }

    pub fn two_sided(self) -> bool {
        matches!(
            self,
            EstimateKind::SharpBesselPoisson | EstimateKind::SharpPoisson | EstimateKind::HeatBesselLarge
        )
    }

    pub fn default_grid(self, n: usize) -> GridSpec {
        let unit = |t_min: f64, t_max: f64| GridSpec {
            t_min,
            t_max,
            n_t: n,
            x_min: 0.02,
            x_max: 0.98,
            n_x: n,
        };
        match self {
            EstimateKind::SharpBesselPoisson
            | EstimateKind::SharpPoisson
            | EstimateKind::GradBesselPoisson
            | EstimateKind::DeltaPoisson
            | EstimateKind::DyPoisson => unit(0.02, 4.0),
            EstimateKind::HeatHalfline | EstimateKind::HeatHalflineGrad => GridSpec {
                t_min: 1e-2,
                t_max: 10.0,
                n_t: n,
                x_min: 0.05,
                x_max: 2.0,
                n_x: n,
            },
            EstimateKind::HeatBesselUpper => unit(5e-3, 0.99),
            EstimateKind::HeatBesselLarge => unit(1.0, 5.0),
        }
    }

    fn needs_series(self) -> bool {
        !matches!(self, EstimateKind::HeatHalfline | EstimateKind::HeatHalflineGrad)
    }
}

impl FromStr for EstimateKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ALL_ESTIMATES
            .iter()
            .copied()
            .find(|k| k.id() == s)
            .ok_or_else(|| Error::invalid(format!("unknown estimate '{s}'")))
    }
}

/// Tensor grid: geometric in `t`, uniform in `x` and `y`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub n_t: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub n_x: usize,
}

impl GridSpec {
    /// Halve every spacing, keeping the old nodes.
    pub fn refined(&self) -> GridSpec {
        GridSpec {
            n_t: 2 * self.n_t - 1,
            n_x: 2 * self.n_x - 1,
            ..*self
        }
    }

    pub fn times(&self) -> Vec<f64> {
        geometric(self.t_min, self.t_max, self.n_t)
    }

    pub fn points(&self) -> Vec<f64> {
        if self.n_x == 1 {
            return vec![self.x_min];
        }
        (0..self.n_x)
            .map(|i| self.x_min + (self.x_max - self.x_min) * i as f64 / (self.n_x - 1) as f64)
            .collect()
    }

    fn validate(&self) -> Result<()> {
        let ok = self.t_min > 0.0
            && self.t_max >= self.t_min
            && self.x_min > 0.0
            && self.x_max >= self.x_min
            && self.n_t >= 1
            && self.n_x >= 1;
        if !ok {
            return Err(Error::invalid("grid needs positive ranges and at least one node per axis"));
        }
        Ok(())
    }
}

pub(crate) fn geometric(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let r = (b / a).ln() / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { b } else { a * (r * i as f64).exp() }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub lemma_id: String,
    pub nu: f64,
    pub two_sided: bool,
    pub grid: GridSpec,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub points: usize,
    pub witnesses: Vec<Witness>,
}

/// Evaluates `kernel / comparand` for one estimate, caching mode values per point.
pub struct EstimateChecker<'a> {
    basis: &'a EigenBasis,
    kind: EstimateKind,
    cache: HashMap<u64, Vec<f64>>,
}

enum Table {
    Phi,
    Psi,
    Shifted,
}

impl<'a> EstimateChecker<'a> {
    pub fn new(basis: &'a EigenBasis, kind: EstimateKind) -> Self {
        EstimateChecker {
            basis,
            kind,
            cache: HashMap::new(),
        }
    }

    fn modes(&mut self, table: Table, x: f64, count: usize) -> &[f64] {
        let tag = match table {
            Table::Phi => 0u64,
            Table::Psi => 1,
            Table::Shifted => 2,
        };
        // low bits of the key distinguish the three tables; points differ well above them
        let key = (x.to_bits() & !3) | tag;
        let b = self.basis;
        let v = self.cache.entry(key).or_default();
        if v.len() < count {
            for n in v.len() + 1..=count {
                v.push(match table {
                    Table::Phi => b.phi_unchecked(n, x),
                    Table::Psi => b.psi_unchecked(n, x),
                    Table::Shifted => b.psi_shifted_unchecked(n, x),
                });
            }
        }
        &v[..count]
    }

    fn series(
        &mut self,
        decay: Decay,
        t: f64,
        x: f64,
        y: f64,
        tables: (Table, Table),
        with_lambda: bool,
        envelope: f64,
        tol: f64,
    ) -> Result<f64> {
        let (n, _) = terms_for(
            self.basis,
            decay,
            t,
            envelope,
            with_lambda,
            tol,
            self.basis.len(),
            "check_sharp_estimates",
        )?;
        let basis = self.basis;
        let a = self.modes(tables.0, x, n).to_vec();
        let b = self.modes(tables.1, y, n);
        Ok((0..n)
            .map(|k| {
                let l = basis.lambda(k + 1);
                decay.weight(t, l) * if with_lambda { l } else { 1.0 } * a[k] * b[k]
            })
            .sum())
    }

    fn poisson_measure(&mut self, t: f64, x: f64, y: f64, scale: f64) -> Result<f64> {
        let k = self.basis.envelope_constant();
        let h = (x * y).powf(self.basis.order().value() + 0.5);
        self.series(Decay::Poisson, t, x, y, (Table::Phi, Table::Phi), false, k * k / h, RELATIVE_TOL * scale)
    }

    fn poisson_lebesgue(&mut self, t: f64, x: f64, y: f64, scale: f64) -> Result<f64> {
        let k = self.basis.envelope_constant();
        self.series(Decay::Poisson, t, x, y, (Table::Psi, Table::Psi), false, k * k, RELATIVE_TOL * scale)
    }

    fn delta(&mut self, t: f64, x: f64, y: f64, scale: f64) -> Result<f64> {
        let env = self.basis.envelope_constant() * self.basis.shifted_envelope_constant();
        self.series(Decay::Poisson, t, x, y, (Table::Shifted, Table::Psi), true, env, RELATIVE_TOL * scale)
    }

    fn heat_measure(&mut self, t: f64, x: f64, y: f64, scale: f64) -> Result<f64> {
        let k = self.basis.envelope_constant();
        let h = (x * y).powf(self.basis.order().value() + 0.5);
        self.series(Decay::Heat, t, x, y, (Table::Phi, Table::Phi), false, k * k / h, RELATIVE_TOL * scale)
    }

    /// `kernel / comparand` (absolute value of the kernel for one-sided bounds).
    pub fn ratio_at(&mut self, t: f64, x: f64, y: f64) -> Result<f64> {
        let nu = self.basis.order().value();
        let a = nu + 0.5;
        let d2 = (x - y) * (x - y);
        let l1 = self.basis.lambda(1);
        let poisson_profile = |t: f64| {
            if t <= 1.0 {
                (1.0 / (t * t + x * x + y * y)).powf(a)
                    * ((1.0 - x) * (1.0 - y) / (t * t + (1.0 - x).powi(2) + (1.0 - y).powi(2)))
                    * t
                    / (t * t + d2)
            } else {
                (1.0 - x) * (1.0 - y) * (-t * l1).exp()
            }
        };
        let mu = MeasureMu::new(self.basis.order());
        let gauss = (-GAUSS_C * d2 / t).exp();
        Ok(match self.kind {
            EstimateKind::SharpBesselPoisson => {
                let c = poisson_profile(t);
                self.poisson_measure(t, x, y, c)? / c
            }
            EstimateKind::SharpPoisson => {
                let c = poisson_profile(t) * (x * y).powf(a);
                self.poisson_lebesgue(t, x, y, c)? / c
            }
            EstimateKind::GradBesselPoisson => {
                let h = (x * y).powf(a);
                let c = 1.0 / (h * (t * t + d2));
                (self.delta(t, x, y, c * h)? / h).abs() / c
            }
            EstimateKind::DeltaPoisson => {
                let c = 1.0 / (t * t + d2);
                self.delta(t, x, y, c)?.abs() / c
            }
            EstimateKind::DyPoisson => {
                let s = 1.0 / (t * t + d2);
                let p = self.poisson_lebesgue(t, x, y, s)?;
                let dl = self.delta(t, y, x, s)?;
                let dy = a / y * p - dl;
                dy.abs() / (s + p.abs() / y)
            }
            // logs keep both sides representable when the Gaussian factors underflow
            EstimateKind::HeatHalfline => {
                let log_c = -GAUSS_C * d2 / t - mu.ball(x, t.sqrt()).ln();
                (heat_log(nu, t, x, y) - log_c).exp()
            }
            EstimateKind::HeatHalflineGrad => {
                let log_c = -GAUSS_C * d2 / t - (t.sqrt() * mu.ball(x, t.sqrt())).ln();
                (dz_heat_log(nu, t, x, y).0 - log_c).exp()
            }
            EstimateKind::HeatBesselUpper => {
                let c = gauss / (t.sqrt() * t.max(x * y).powf(a));
                self.heat_measure(t, x, y, c)?.abs() / c
            }
            EstimateKind::HeatBesselLarge => {
                let c = (1.0 - x) * (1.0 - y) * (-t * l1 * l1).exp();
                self.heat_measure(t, x, y, c)? / c
            }
        })
    }

    pub fn run(&mut self, grid: &GridSpec) -> Result<EstimateReport> {
        grid.validate()?;
        if self.kind.needs_series() && grid.x_max > 1.0 {
            return Err(Error::invalid("series estimates need points inside (0, 1]"));
        }
        let mut lo = Witness {
            t: 0.0,
            x: 0.0,
            y: 0.0,
            ratio: f64::INFINITY,
        };
        let mut hi = Witness {
            ratio: f64::NEG_INFINITY,
            ..lo
        };
        let xs = grid.points();
        let mut count = 0;
        for &t in &grid.times() {
            for &x in &xs {
                for &y in &xs {
                    let r = self.ratio_at(t, x, y)?;
                    if !r.is_finite() {
                        return Err(Error::no_conv(
                            "check_sharp_estimates",
                            format!("non-finite ratio at t={t} x={x} y={y}"),
                        ));
                    }
                    count += 1;
                    if r < lo.ratio {
                        lo = Witness { t, x, y, ratio: r };
                    }
                    if r > hi.ratio {
                        hi = Witness { t, x, y, ratio: r };
                    }
                }
            }
        }
        Ok(EstimateReport {
            lemma_id: self.kind.id().to_string(),
            nu: self.basis.order().value(),
            two_sided: self.kind.two_sided(),
            grid: *grid,
            min_ratio: lo.ratio,
            max_ratio: hi.ratio,
            points: count,
            witnesses: vec![lo, hi],
        })
    }
}

/// Sweep one estimate over `grid`.
pub fn check_sharp_estimates(basis: &EigenBasis, kind: EstimateKind, grid: &GridSpec) -> Result<EstimateReport> {
    EstimateChecker::new(basis, kind).run(grid)
}
