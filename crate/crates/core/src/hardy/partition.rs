//! Smooth partitions of unity subordinate to the enlarged dyadic intervals.
//!
//! `eta_j` rises across the left endpoint of its cell and falls across the right one.
//! Each transition is a degree-5 smoothstep of half-width `zeta/4` times the shorter
//! of the two adjacent cells, so it stays inside both enlargements.

use serde::{Deserialize, Serialize};

use super::cover::{Family, Interval, ZETA};
use crate::error::Result;
use crate::smoothstep;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionOfUnity {
    pub family: Family,
}

/// Boundary point between two adjacent cells and the transition half-width there.
#[derive(Debug, Clone, Copy)]
struct Transition {
    at: f64,
    half: f64,
}

impl Transition {
    fn between(left: &Interval, right: &Interval) -> Transition {
        Transition {
            at: left.b,
            half: left.len().min(right.len()) * ZETA / 4.0,
        }
    }

    fn arg(&self, x: f64) -> f64 {
        (x - (self.at - self.half)) / (2.0 * self.half)
    }

    /// Rising step, 0 left of the transition and 1 right of it.
    fn up(&self, x: f64) -> f64 {
        smoothstep::value(self.arg(x))
    }

    fn up_slope(&self, x: f64) -> f64 {
        smoothstep::first(self.arg(x)) / (2.0 * self.half)
    }
}

pub fn build_partition(family: Family) -> PartitionOfUnity {
    PartitionOfUnity { family }
}

impl PartitionOfUnity {
    fn transitions(&self, j: i32) -> Result<(Option<Transition>, Transition)> {
        let cell = self.family.interval(j)?;
        let left = match self.family.prev(j) {
            Some(p) => Some(Transition::between(&self.family.interval(p)?, &cell)),
            None => None,
        };
        let right = Transition::between(&cell, &self.family.interval(self.family.next(j))?);
        Ok((left, right))
    }

    /// `eta_j(x)`; zero for indices outside the family.
    pub fn eta(&self, j: i32, x: f64) -> f64 {
        let Ok((left, right)) = self.transitions(j) else {
            return 0.0;
        };
        let rise = left.map_or(1.0, |l| l.up(x));
        // 1 - up keeps the sum of two neighbours exactly 1 - s + s
        rise * (1.0 - right.up(x))
    }

    pub fn eta_prime(&self, j: i32, x: f64) -> f64 {
        let Ok((left, right)) = self.transitions(j) else {
            return 0.0;
        };
        let (rise, drise) = left.map_or((1.0, 0.0), |l| (l.up(x), l.up_slope(x)));
        drise * (1.0 - right.up(x)) - rise * right.up_slope(x)
    }

    /// Closed interval outside which `eta_j` vanishes.
    pub fn support(&self, j: i32) -> Result<(f64, f64)> {
        let (left, right) = self.transitions(j)?;
        let a = left.map_or(0.0, |l| l.at - l.half);
        Ok((a, right.at + right.half))
    }

    /// Closed interval on which `eta_j = 1`.
    pub fn plateau(&self, j: i32) -> Result<(f64, f64)> {
        let (left, right) = self.transitions(j)?;
        let a = left.map_or(0.0, |l| l.at + l.half);
        Ok((a, right.at - right.half))
    }

    /// Exact sup of `|eta_j'|`, reached at the middle of the sharper transition.
    pub fn derivative_bound(&self, j: i32) -> Result<f64> {
        let (left, right) = self.transitions(j)?;
        let h = left.map_or(right.half, |l| l.half.min(right.half));
        Ok(smoothstep::MAX_FIRST / (2.0 * h))
    }

    /// Indices with `eta_j(x) > 0` and their values; at most two.
    pub fn active(&self, x: f64) -> Result<Vec<(i32, f64)>> {
        let j = self.family.index_of(x)?;
        let mut out = Vec::with_capacity(2);
        let mut cands = vec![j, self.family.next(j)];
        if let Some(p) = self.family.prev(j) {
            cands.insert(0, p);
        }
        for k in cands {
            let v = self.eta(k, x);
            if v > 0.0 {
                out.push((k, v));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_is_flat() {
        for fam in [Family::I, Family::J] {
            let p = build_partition(fam);
            for j in fam.indices(6) {
                let (a, b) = p.plateau(j).unwrap();
                let (sa, sb) = p.support(j).unwrap();
                assert!(sa <= a && a < b && b < sb);
                for k in 0..=20 {
                    let x = a + (b - a) * k as f64 / 20.0;
                    if x > 0.0 {
                        assert_eq!(p.eta(j, x), 1.0);
                    }
                }
            }
        }
    }

    #[test]
    fn sums_to_one() {
        for fam in [Family::I, Family::J] {
            let p = build_partition(fam);
            for i in 1..10_000 {
                let x = i as f64 / 10_000.0;
                let s: f64 = p.active(x).unwrap().iter().map(|(_, v)| v).sum();
                assert!((s - 1.0).abs() < 1e-12, "{fam:?} x={x} s={s}");
                // exhaustive sum over the index range agrees with the active set
                let all: f64 = fam.indices(20).iter().map(|&j| p.eta(j, x)).sum();
                assert!((all - s).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn support_inside_enlargement() {
        for fam in [Family::I, Family::J] {
            let p = build_partition(fam);
            for j in fam.indices(12) {
                let (a, b) = p.support(j).unwrap();
                let star = fam.interval(j).unwrap().star();
                assert!(a >= star.a && b < star.b, "{fam:?} j={j}");
                if a > 0.0 {
                    assert_eq!(p.eta(j, a), 0.0);
                }
                assert_eq!(p.eta(j, b), 0.0);
                let c = fam.interval(j).unwrap().center();
                assert_eq!(p.eta(j, c), 1.0);
            }
        }
    }

    #[test]
    fn derivative_scales_dyadically() {
        for fam in [Family::I, Family::J] {
            let p = build_partition(fam);
            let mut consts = Vec::new();
            for j in fam.indices(12) {
                let (a, b) = p.support(j).unwrap();
                let mut m: f64 = 0.0;
                for i in 0..=20_000 {
                    let x = a + (b - a) * i as f64 / 20_000.0;
                    m = m.max(p.eta_prime(j, x).abs());
                    let h = 1e-7 * (b - a);
                    if x - h > 0.0 && i % 97 == 0 {
                        let fd = (p.eta(j, x + h) - p.eta(j, x - h)) / (2.0 * h);
                        assert!((fd - p.eta_prime(j, x)).abs() < 1e-4 * p.derivative_bound(j).unwrap());
                    }
                }
                assert!(m <= p.derivative_bound(j).unwrap() * (1.0 + 1e-12));
                consts.push(m / 2f64.powi(j.abs()));
            }
            let hi = consts.iter().cloned().fold(0.0, f64::max);
            assert!(hi <= 1500.0, "{fam:?} {consts:?}");
        }
    }
}
