//! Empirical constants in the size, lower-bound and Lipschitz conditions for the
//! local Poisson kernel families.

use serde::{Deserialize, Serialize};

use super::engine::mode_row;
use crate::basis::{mu_distance, EigenBasis, MeasureMu, System};
use crate::error::{Error, Result};
use crate::hardy::{Family, Interval};
use crate::kernels::poisson_kernel_halfline;
use crate::specfun::Order;

/// Modes with `t lambda` above this are dropped from the kernel series.
const KERNEL_CUTOFF: f64 = 25.0;

/// `t(x, r)`: `r x^{-2nu-1}` when `r <= x^{2nu+2}`, else `r^{1/(2nu+2)}`.
pub fn reparametrized_time(order: Order, r: f64, x: f64) -> f64 {
    let nu = order.value();
    if r <= x.powf(2.0 * nu + 2.0) {
        r * x.powf(-2.0 * nu - 1.0)
    } else {
        r.powf(1.0 / (2.0 * nu + 2.0))
    }
}

fn inner_zero() -> Interval {
    Family::I.interval(0).expect("index 0 exists").stars(2)
}

/// `K(r, x, y)`: the half-line Poisson kernel at the reparametrized time.
pub fn uchiyama_kernel(order: Order, r: f64, x: f64, y: f64) -> Result<f64> {
    let i = inner_zero();
    let top = i.mu(order);
    if !(r > 0.0 && r < top) {
        return Err(Error::invalid(format!("r must lie in (0, {top}), got {r}")));
    }
    if !(i.contains(x) && i.contains(y)) {
        return Err(Error::invalid(format!("points must lie in {i}")));
    }
    poisson_kernel_halfline(order, reparametrized_time(order, r, x), x, y)
}

/// Which kernel family and local space to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UchiyamaFamily {
    /// `calP_t` on `I_j**`, `0 < t < mu(I_j**)`, distance `|x - y|`.
    BesselPoisson { j: i32 },
    /// `P_t` on `J_j**`, `0 < t < |J_j**|`, Lebesgue measure.
    Poisson { j: i32 },
    /// `K(r, x, y)` on `I_0**` with the distance `d_mu`.
    Reparametrized,
}

impl UchiyamaFamily {
    pub fn id(&self) -> String {
        match self {
            UchiyamaFamily::BesselPoisson { j } => format!("calK_{j}"),
            UchiyamaFamily::Poisson { j } => format!("K_{j}"),
            UchiyamaFamily::Reparametrized => "K_r".into(),
        }
    }

    pub fn space(&self) -> Result<Interval> {
        Ok(match *self {
            UchiyamaFamily::BesselPoisson { j } => {
                if j < 1 {
                    return Err(Error::invalid("the calP family is checked for j >= 1"));
                }
                Family::I.interval(j)?.stars(2)
            }
            UchiyamaFamily::Poisson { j } => Family::J.interval(j)?.stars(2),
            UchiyamaFamily::Reparametrized => inner_zero(),
        })
    }

    /// Basis size `check_uchiyama_conditions` needs for this family on `grid`.
    pub fn required_modes(&self, order: Order, grid: &UchiyamaGrid) -> Result<usize> {
        if *self == UchiyamaFamily::Reparametrized {
            return Ok(1);
        }
        let t = self.scale_limit(order)? / grid.span;
        // zeros satisfy lambda_n > (n - 1/2) pi
        Ok((KERNEL_CUTOFF / (t * std::f64::consts::PI)) as usize + 2)
    }

    /// Upper end of the scale parameter range.
    pub fn scale_limit(&self, order: Order) -> Result<f64> {
        let i = self.space()?;
        Ok(match self {
            UchiyamaFamily::Poisson { .. } => i.len(),
            _ => i.mu(order),
        })
    }
}

/// Sampling of the scale parameter and the points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UchiyamaGrid {
    pub n_points: usize,
    pub n_scales: usize,
    /// Scales run geometrically over `[limit / span, 0.99 limit]`.
    pub span: f64,
}

impl Default for UchiyamaGrid {
    fn default() -> Self {
        UchiyamaGrid {
            n_points: 12,
            n_scales: 8,
            span: 64.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UchiyamaReport {
    pub family: String,
    pub nu: f64,
    pub interval: [f64; 2],
    pub scale_limit: f64,
    /// `max 1 / (r K(r, x, x))`.
    pub lower_constant: f64,
    /// `max r K (1 + d/r)^2`.
    pub upper_constant: f64,
    /// `max |K(r,x,y) - K(r,x,z)| r^2 (1 + d(x,y)/r)^2 / d(y,z)` over admissible `z`.
    pub lipschitz_constant: f64,
    /// Most negative kernel value seen, relative to `1/r`; zero when `K >= 0` throughout.
    pub negativity: f64,
    pub evaluations: usize,
}

impl UchiyamaReport {
    pub fn constant(&self) -> f64 {
        self.lower_constant.max(self.upper_constant).max(self.lipschitz_constant)
    }

    pub fn is_finite(&self) -> bool {
        [self.lower_constant, self.upper_constant, self.lipschitz_constant]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0)
    }
}

/// Coordinates in which the checker measures distance: `u(x) = x`, or `u(x) = mu((0, x))`.
struct Coordinates {
    order: Order,
    measure: bool,
}

impl Coordinates {
    fn to_u(&self, x: f64) -> f64 {
        if self.measure {
            MeasureMu::new(self.order).interval(0.0, x)
        } else {
            x
        }
    }

    fn from_u(&self, u: f64) -> f64 {
        if self.measure {
            let p = self.order.mu_exponent();
            (p * u).powf(1.0 / p)
        } else {
            u
        }
    }

    fn dist(&self, x: f64, y: f64) -> f64 {
        if self.measure {
            mu_distance(self.order, x, y)
        } else {
            (x - y).abs()
        }
    }
}

/// Kernel evaluator with cached mode rows at the fixed points.
enum Evaluator<'a> {
    Series {
        basis: &'a EigenBasis,
        sys: System,
        rows: Vec<Vec<f64>>,
    },
    HalfLine {
        order: Order,
    },
}

impl Evaluator<'_> {
    fn modes(basis: &EigenBasis, t: f64) -> usize {
        basis.zeros().partition_point(|&l| t * l <= KERNEL_CUTOFF)
    }

    fn weights(basis: &EigenBasis, t: f64) -> Vec<f64> {
        let n = Self::modes(basis, t);
        basis.zeros()[..n].iter().map(|&l| (-t * l).exp()).collect()
    }

    /// Kernel between fixed point `i` and an arbitrary point `y` (row supplied).
    fn with_row(&self, w: &[f64], i: usize, row: &[f64]) -> f64 {
        match self {
            Evaluator::Series { rows, .. } => w.iter().zip(&rows[i]).zip(row).map(|((a, b), c)| a * b * c).sum(),
            Evaluator::HalfLine { .. } => unreachable!("series only"),
        }
    }
}

/// Empirical constants for one kernel family.
pub fn check_uchiyama_conditions(
    basis: &EigenBasis,
    family: UchiyamaFamily,
    grid: &UchiyamaGrid,
) -> Result<UchiyamaReport> {
    let order = basis.order();
    let space = family.space()?;
    let limit = family.scale_limit(order)?;
    let coords = Coordinates {
        order,
        measure: family == UchiyamaFamily::Reparametrized,
    };
    if grid.n_points < 2 || grid.n_scales < 2 || !(grid.span > 1.0) {
        return Err(Error::invalid("need at least two points and scales and span > 1"));
    }
    let (u0, u1) = (coords.to_u(space.a), coords.to_u(space.b));
    let pts: Vec<f64> = (0..grid.n_points)
        .map(|i| coords.from_u(u0 + (u1 - u0) * (i as f64 + 0.5) / grid.n_points as f64))
        .collect();
    let scales: Vec<f64> = (0..grid.n_scales)
        .map(|k| {
            let lo = (limit / grid.span).ln();
            let hi = (0.99 * limit).ln();
            (lo + (hi - lo) * k as f64 / (grid.n_scales - 1) as f64).exp()
        })
        .collect();

    let eval = match family {
        UchiyamaFamily::Reparametrized => Evaluator::HalfLine { order },
        _ => {
            let sys = if matches!(family, UchiyamaFamily::Poisson { .. }) {
                System::Psi
            } else {
                System::Phi
            };
            let n = Evaluator::modes(basis, scales[0]);
            if n >= basis.len() {
                return Err(Error::no_conv(
                    "check_uchiyama_conditions",
                    format!("basis of {} modes too small for scale {:e}", basis.len(), scales[0]),
                ));
            }
            let rows = pts
                .iter()
                .map(|&x| {
                    let mut r = vec![0.0; n];
                    mode_row(basis, sys, x, &mut r);
                    r
                })
                .collect();
            Evaluator::Series { basis, sys, rows }
        }
    };

    let mut rep = UchiyamaReport {
        family: family.id(),
        nu: order.value(),
        interval: [space.a, space.b],
        scale_limit: limit,
        lower_constant: 0.0,
        upper_constant: 0.0,
        lipschitz_constant: 0.0,
        negativity: 0.0,
        evaluations: 0,
    };
    let mut zrow = Vec::new();
    for &r in &scales {
        // K(r, x_i, y) for fixed x_i and any y
        let w = match &eval {
            Evaluator::Series { basis, .. } => Evaluator::weights(basis, r),
            Evaluator::HalfLine { .. } => Vec::new(),
        };
        let mut kernel = |i: usize, y: f64, row: Option<&[f64]>| -> Result<f64> {
            rep.evaluations += 1;
            match &eval {
                Evaluator::Series { basis, sys, .. } => match row {
                    Some(rw) => Ok(eval.with_row(&w, i, rw)),
                    None => {
                        zrow.resize(w.len(), 0.0);
                        mode_row(basis, *sys, y, &mut zrow);
                        Ok(eval.with_row(&w, i, &zrow))
                    }
                },
                Evaluator::HalfLine { order } => {
                    poisson_kernel_halfline(*order, reparametrized_time(*order, r, pts[i]), pts[i], y)
                }
            }
        };
        let table: Vec<Vec<f64>> = (0..pts.len())
            .map(|i| {
                (0..pts.len())
                    .map(|k| {
                        let row = match &eval {
                            Evaluator::Series { rows, .. } => Some(&rows[k][..w.len()]),
                            Evaluator::HalfLine { .. } => None,
                        };
                        kernel(i, pts[k], row)
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        for i in 0..pts.len() {
            rep.lower_constant = rep.lower_constant.max(1.0 / (r * table[i][i]));
            for k in 0..pts.len() {
                let d = coords.dist(pts[i], pts[k]);
                let v = table[i][k];
                rep.negativity = rep.negativity.min(v * r);
                rep.upper_constant = rep.upper_constant.max(v * r * (1.0 + d / r).powi(2));
            }
        }
        let a0 = rep.lower_constant.max(rep.upper_constant);
        // Lipschitz condition at admissible offsets, on every third base point
        for i in (0..pts.len()).step_by(3) {
            for k in 0..pts.len() {
                let y = pts[k];
                let dxy = coords.dist(pts[i], y);
                let h = (r + dxy) / (4.0 * a0);
                for frac in [1.0, 0.25] {
                    for sign in [-1.0, 1.0] {
                        let uz = coords.to_u(y) + sign * frac * h;
                        if uz <= u0 || uz > u1 {
                            continue;
                        }
                        let z = coords.from_u(uz);
                        let dyz = coords.dist(y, z);
                        if dyz == 0.0 {
                            continue;
                        }
                        let kz = kernel(i, z, None)?;
                        let ratio = (table[i][k] - kz).abs() * r * r * (1.0 + dxy / r).powi(2) / dyz;
                        rep.lipschitz_constant = rep.lipschitz_constant.max(ratio);
                    }
                }
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reparametrized_time_branches() {
        let o = Order::new(0.0).unwrap();
        assert_eq!(reparametrized_time(o, 0.125, 0.5), 0.25);
        assert!((reparametrized_time(o, 0.125, 0.25) - 0.125f64.sqrt()).abs() < 1e-15);
        // continuous across the switch r = x^{2nu+2}
        let o = Order::new(1.3).unwrap();
        let x: f64 = 0.4;
        let r = x.powf(4.6);
        assert!((reparametrized_time(o, r, x) - reparametrized_time(o, r * (1.0 + 1e-12), x)).abs() < 1e-10);
    }

    #[test]
    fn kernel_range_checks() {
        let o = Order::new(0.5).unwrap();
        assert!(uchiyama_kernel(o, 0.01, 0.3, 0.2).unwrap() > 0.0);
        assert!(uchiyama_kernel(o, 0.0, 0.3, 0.2).is_err());
        assert!(uchiyama_kernel(o, 0.5, 0.3, 0.2).is_err());
        assert!(uchiyama_kernel(o, 0.01, 0.6, 0.2).is_err());
        assert!(check_uchiyama_conditions(&EigenBasis::new(o, 10).unwrap(), UchiyamaFamily::BesselPoisson { j: 0 }, &UchiyamaGrid::default()).is_err());
    }

    #[test]
    fn lower_bound_on_the_diagonal() {
        let o = Order::new(0.5).unwrap();
        let b = EigenBasis::new(o, 10).unwrap();
        let rep = check_uchiyama_conditions(&b, UchiyamaFamily::Reparametrized, &UchiyamaGrid::default()).unwrap();
        assert!(rep.is_finite(), "{rep:?}");
        assert!(rep.negativity > -1e-12);
    }

    #[test]
    fn series_family_constants_are_finite() {
        let o = Order::new(0.0).unwrap();
        let b = EigenBasis::new(o, 4000).unwrap();
        let small = UchiyamaGrid {
            n_points: 8,
            n_scales: 4,
            span: 16.0,
        };
        for fam in [UchiyamaFamily::BesselPoisson { j: 2 }, UchiyamaFamily::Poisson { j: -2 }] {
            let rep = check_uchiyama_conditions(&b, fam, &small).unwrap();
            assert!(rep.is_finite(), "{rep:?}");
            assert!(rep.negativity > -1e-9, "{rep:?}");
        }
    }

    #[test]
    fn required_modes_suffice() {
        let o = Order::new(1.5).unwrap();
        let g = UchiyamaGrid {
            n_points: 4,
            n_scales: 3,
            span: 8.0,
        };
        for fam in [UchiyamaFamily::BesselPoisson { j: 3 }, UchiyamaFamily::Poisson { j: 3 }] {
            let n = fam.required_modes(o, &g).unwrap();
            assert!(check_uchiyama_conditions(&EigenBasis::new(o, n).unwrap(), fam, &g).is_ok());
            assert!(check_uchiyama_conditions(&EigenBasis::new(o, n / 2).unwrap(), fam, &g).is_err());
        }
    }
}
