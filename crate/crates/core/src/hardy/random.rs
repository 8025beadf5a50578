//! Seeded random cancellative atoms at dyadic scales.

use std::sync::Arc;

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::atoms::{family_measure, haar_shape, measure_median, Atom, AtomKind, Shape};
use super::cover::{Family, Interval};
use crate::basis::StepFunction;
use crate::error::{Error, Result};
use crate::specfun::Order;

pub const MAX_SCALE: u32 = 8;
const TENT_PIECES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    Haar,
    TentMinusMean,
    TwoBar,
}

pub const PROFILES: [Profile; 3] = [Profile::Haar, Profile::TentMinusMean, Profile::TwoBar];

#[derive(Debug, Clone)]
pub struct RandomAtom {
    pub atom: Atom,
    /// The interval has length `2^-scale`.
    pub scale: u32,
    pub profile: Profile,
}

fn step_atom(family: Family, order: Order, iv: Interval, breaks: Vec<f64>, heights: Vec<f64>) -> Result<Atom> {
    let peak = heights.iter().fold(0.0f64, |m, h| m.max(h.abs()));
    let norm = 1.0 / (family_measure(family, order, iv.a, iv.b) * peak);
    let heights = heights.into_iter().map(|h| h * norm).collect();
    Ok(Atom {
        kind: AtomKind::Cancellative,
        family,
        order,
        interval: iv,
        j: None,
        shape: Shape::Step(Arc::new(StepFunction::new(breaks, heights)?)),
    })
}

fn tent(family: Family, order: Order, iv: Interval) -> Result<Atom> {
    let breaks: Vec<f64> = (0..=TENT_PIECES)
        .map(|i| iv.a + iv.len() * i as f64 / TENT_PIECES as f64)
        .collect();
    let masses: Vec<f64> = breaks.windows(2).map(|w| family_measure(family, order, w[0], w[1])).collect();
    let bumps: Vec<f64> = (0..TENT_PIECES)
        .map(|i| 1.0 - (2.0 * (i as f64 + 0.5) / TENT_PIECES as f64 - 1.0).abs())
        .collect();
    let total: f64 = masses.iter().sum();
    let mean = bumps.iter().zip(&masses).map(|(b, m)| b * m).sum::<f64>() / total;
    step_atom(family, order, iv, breaks, bumps.iter().map(|b| b - mean).collect())
}

fn two_bar<R: Rng>(rng: &mut R, family: Family, order: Order, iv: Interval) -> Result<Atom> {
    let cut = iv.a + iv.len() * rng.random_range(0.25..0.75);
    let (p, q) = (rng.random_range(0.0..0.5), rng.random_range(0.5..1.0));
    let left = (iv.a + (cut - iv.a) * p, cut);
    let right = (cut, cut + (iv.b - cut) * q);
    let (ml, mr) = (
        family_measure(family, order, left.0, left.1),
        family_measure(family, order, right.0, right.1),
    );
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let mut breaks = vec![iv.a];
    let mut heights = Vec::new();
    if left.0 > iv.a {
        breaks.push(left.0);
        heights.push(0.0);
    }
    breaks.extend([left.1, right.1]);
    heights.extend([sign, -sign * ml / mr]);
    if right.1 < iv.b {
        breaks.push(iv.b);
        heights.push(0.0);
    }
    step_atom(family, order, iv, breaks, heights)
}

/// One atom: scale `k` uniform in `0..=max_scale`, left end uniform, profile uniform.
pub fn random_atom<R: Rng>(rng: &mut R, family: Family, order: Order, max_scale: u32) -> Result<RandomAtom> {
    if max_scale > 30 {
        return Err(Error::invalid("max_scale must be at most 30"));
    }
    let scale = rng.random_range(0..=max_scale);
    let len = 0.5f64.powi(scale as i32);
    let a = if scale == 0 { 0.0 } else { rng.random_range(0.0..1.0 - len) };
    let iv = Interval::new(a, (a + len).min(1.0))?;
    let profile = PROFILES[rng.random_range(0..PROFILES.len())];
    let atom = match profile {
        Profile::Haar => Atom {
            kind: AtomKind::Cancellative,
            family,
            order,
            interval: iv,
            j: None,
            shape: haar_shape(family, order, iv.a, measure_median(family, order, iv.a, iv.b), iv.b),
        },
        Profile::TentMinusMean => tent(family, order, iv)?,
        Profile::TwoBar => two_bar(rng, family, order, iv)?,
    };
    Ok(RandomAtom { atom, scale, profile })
}

pub fn random_batch(seed: u64, count: usize, family: Family, order: Order, max_scale: u32) -> Result<Vec<RandomAtom>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_atom(&mut rng, family, order, max_scale)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::validate_atom;

    #[test]
    fn batch_is_valid_and_reproducible() {
        let o = Order::new(0.7).unwrap();
        for fam in [Family::I, Family::J] {
            let a = random_batch(11, 60, fam, o, MAX_SCALE).unwrap();
            let b = random_batch(11, 60, fam, o, MAX_SCALE).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert_eq!(x.atom.interval, y.atom.interval);
                assert_eq!(x.atom.to_step(), y.atom.to_step());
                let r = validate_atom(&x.atom);
                assert!(r.valid && (r.constant - 1.0).abs() < 1e-12, "{r:?}");
                assert!((x.atom.interval.len() - 0.5f64.powi(x.scale as i32)).abs() < 1e-15);
            }
            for p in PROFILES {
                assert!(a.iter().any(|x| x.profile == p));
            }
        }
    }
}
