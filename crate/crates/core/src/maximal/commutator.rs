//! Commutator kernels `sum_j sup_t |(eta_j(x) - eta_j(y)) K_t(x, y)|` for the two
//! partitions of unity: the Bessel Poisson kernel over the `I` cells (times below
//! `mu(I_j**)`) and the Lebesgue-form kernel over the `J` cells (times below `|J_j**|`).

use serde::{Deserialize, Serialize};

use super::engine::mode_row;
use crate::basis::{EigenBasis, System};
use crate::error::{Error, Result};
use crate::hardy::{Family, PartitionOfUnity};
use crate::kernels::SeriesKernels;
use crate::quadrature::push_panel;

/// Ratio of the geometric time grid used for each sup.
const SUP_RATIO: f64 = 1.1;
/// The sup in `t` sits near `|x - y|`; the grid starts this factor below it.
const LOWER_FACTOR: f64 = 8.0;
const KERNEL_CUTOFF: f64 = 25.0;
const PANEL_NODES: usize = 8;

fn time_limit(basis: &EigenBasis, family: Family, j: i32) -> Result<f64> {
    let iv = family.interval(j)?.stars(2);
    Ok(match family {
        Family::I => iv.mu(basis.order()),
        Family::J => iv.len(),
    })
}

fn sup_times(limit: f64, d: f64) -> Vec<f64> {
    let lo = limit.min(d) / LOWER_FACTOR;
    let steps = ((limit / lo).ln() / SUP_RATIO.ln()).ceil().max(1.0) as usize;
    (0..=steps)
        .map(|k| lo * (limit / lo).powf(k as f64 / steps as f64))
        .collect()
}

fn differences(partition: &PartitionOfUnity, x: f64, y: f64) -> Result<Vec<(i32, f64)>> {
    let mut js: Vec<i32> = partition.active(x)?.into_iter().map(|(j, _)| j).collect();
    js.extend(partition.active(y)?.into_iter().map(|(j, _)| j));
    js.sort_unstable();
    js.dedup();
    Ok(js
        .into_iter()
        .map(|j| (j, partition.eta(j, x) - partition.eta(j, y)))
        .filter(|&(_, d)| d != 0.0)
        .collect())
}

/// One summand of the commutator kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommutatorTerm {
    pub j: i32,
    pub eta_difference: f64,
    pub time_limit: f64,
    /// `sup_t |(eta_j(x) - eta_j(y)) K_t(x, y)|` over the grid.
    pub sup: f64,
    pub argmax_t: f64,
}

/// Per-index terms at `(x, y)`; empty on the diagonal.
pub fn commutator_terms(basis: &EigenBasis, partition: &PartitionOfUnity, x: f64, y: f64) -> Result<Vec<CommutatorTerm>> {
    for v in [x, y] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::invalid(format!("points must lie in (0, 1), got {v}")));
        }
    }
    let d = (x - y).abs();
    if d == 0.0 {
        return Ok(Vec::new());
    }
    let sk = SeriesKernels::new(basis).with_cap(basis.len());
    differences(partition, x, y)?
        .into_iter()
        .map(|(j, diff)| {
            let limit = time_limit(basis, partition.family, j)?;
            let mut best = (0.0f64, limit);
            for t in sup_times(limit, d) {
                let k = match partition.family {
                    Family::I => sk.poisson_kernel_l(t, x, y)?.value,
                    Family::J => sk.poisson_kernel_lsq(t, x, y)?.value,
                };
                if k.abs() > best.0 {
                    best = (k.abs(), t);
                }
            }
            Ok(CommutatorTerm {
                j,
                eta_difference: diff,
                time_limit: limit,
                sup: diff.abs() * best.0,
                argmax_t: best.1,
            })
        })
        .collect()
}

/// `calV(x, y)` for the `I` partition, `V(x, y)` for the `J` partition.
pub fn commutator_kernel(basis: &EigenBasis, partition: &PartitionOfUnity, x: f64, y: f64) -> Result<f64> {
    Ok(commutator_terms(basis, partition, x, y)?.iter().map(|t| t.sup).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowIntegral {
    pub family: Family,
    pub y: f64,
    /// `int V(x, y) dm(x)` over `domain`, `m` = mu for `I` and Lebesgue for `J`.
    pub value: f64,
    pub domain: [f64; 2],
    pub nodes: usize,
    pub modes: usize,
}

/// Row integral of the commutator kernel over the cells of depth below `depth`, i.e.
/// over `(0, 1 - 2^-depth]` for `I` and `(2^-depth, 1 - 2^-depth]` for `J`.
pub fn commutator_row_integral(
    basis: &EigenBasis,
    partition: &PartitionOfUnity,
    y: f64,
    depth: i32,
) -> Result<RowIntegral> {
    if !(2..=12).contains(&depth) {
        return Err(Error::invalid("depth must lie in 2..=12"));
    }
    let family = partition.family;
    let lo = match family {
        Family::I => 0.0,
        Family::J => 2f64.powi(-depth),
    };
    let hi = 1.0 - 2f64.powi(-depth);
    if !(y > lo && y < hi) {
        return Err(Error::invalid(format!("y must lie in ({lo}, {hi})")));
    }
    let cells: Vec<i32> = family.indices(depth - 1);
    let mut cuts = vec![lo, hi, y];
    for &j in &cells {
        let (sa, sb) = partition.support(j)?;
        let (pa, pb) = partition.plateau(j)?;
        cuts.extend([sa, sb, pa, pb]);
        for q in 1..4 {
            cuts.push(pa + (pb - pa) * q as f64 / 4.0);
        }
    }
    cuts.retain(|&c| c >= lo && c <= hi);
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup();
    let (mut xs, mut ws) = (Vec::new(), Vec::new());
    for w in cuts.windows(2) {
        push_panel(&mut xs, &mut ws, w[0], w[1], PANEL_NODES);
    }

    let order = basis.order();
    let p = 2.0 * order.value() + 1.0;
    let sys = match family {
        Family::I => System::Phi,
        Family::J => System::Psi,
    };
    // shortest time any sup needs
    let mut plans = Vec::with_capacity(xs.len());
    let mut t_lo = f64::INFINITY;
    for &x in &xs {
        let mut plan = Vec::new();
        if x != y {
            for (j, diff) in differences(partition, x, y)? {
                let times = sup_times(time_limit(basis, family, j)?, (x - y).abs());
                t_lo = t_lo.min(times[0]);
                plan.push((diff, times));
            }
        }
        plans.push(plan);
    }
    let modes = basis.zeros().partition_point(|&l| t_lo * l <= KERNEL_CUTOFF);
    if modes >= basis.len() {
        return Err(Error::no_conv(
            "commutator_row_integral",
            format!("need {modes} modes for t = {t_lo:e}, basis has {}", basis.len()),
        ));
    }
    let lambdas = &basis.zeros()[..modes];
    let mut ry = vec![0.0; modes];
    mode_row(basis, sys, y, &mut ry);
    let mut rx = vec![0.0; modes];
    let mut value = 0.0;
    for ((&x, &w), plan) in xs.iter().zip(&ws).zip(&plans) {
        if plan.is_empty() {
            continue;
        }
        mode_row(basis, sys, x, &mut rx);
        let mut v = 0.0;
        for (diff, times) in plan {
            let mut best = 0.0f64;
            for &t in times {
                let n = lambdas.partition_point(|&l| t * l <= KERNEL_CUTOFF);
                let k: f64 = (0..n).map(|i| (-t * lambdas[i]).exp() * rx[i] * ry[i]).sum();
                best = best.max(k.abs());
            }
            v += diff.abs() * best;
        }
        let m = match family {
            Family::I => x.powf(p),
            Family::J => 1.0,
        };
        value += w * m * v;
    }
    Ok(RowIntegral {
        family,
        y,
        value,
        domain: [lo, hi],
        nodes: xs.len(),
        modes,
    })
}
