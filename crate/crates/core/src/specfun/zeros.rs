//! Positive zeros of `J_nu`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use super::bessel::{j_pair_unchecked, j_unchecked};
use super::Order;
use crate::error::{Error, Result};

/// Residual bound every stored zero satisfies.
pub const ZERO_TOLERANCE: f64 = 1e-12;
/// Refinement iteration cap per zero.
pub const ITERATION_CAP: usize = 100;
const SCAN_STEP: f64 = 0.25;

/// Validated, strictly increasing positive zeros of `J_nu`.
#[derive(Debug, Clone)]
pub struct BesselZeroTable {
    order: Order,
    zeros: Vec<f64>,
    residuals: Vec<f64>,
}

impl BesselZeroTable {
    pub fn order(&self) -> Order {
        self.order
    }

    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }

    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    /// The `n`-th zero, 1-based.
    pub fn get(&self, n: usize) -> Result<f64> {
        if n == 0 || n > self.zeros.len() {
            return Err(Error::IndexOutOfRange {
                index: n,
                len: self.zeros.len(),
            });
        }
        Ok(self.zeros[n - 1])
    }

    /// Copy of the first `count` entries.
    pub fn truncated(&self, count: usize) -> BesselZeroTable {
        let c = count.min(self.zeros.len());
        BesselZeroTable {
            order: self.order,
            zeros: self.zeros[..c].to_vec(),
            residuals: self.residuals[..c].to_vec(),
        }
    }

    fn extend_to(&mut self, count: usize) -> Result<()> {
        let nu = self.order.value();
        self.zeros.reserve(count.saturating_sub(self.zeros.len()));
        while self.zeros.len() < count {
            let k = self.zeros.len() + 1;
            let prev = self.zeros.last().copied();
            let (z, r) = next_zero(nu, k, prev)?;
            if let Some(p) = prev {
                if z - p <= ZERO_TOLERANCE {
                    return Err(Error::no_conv(
                        "bessel_zeros",
                        format!("zero {k} collapsed onto its predecessor"),
                    ));
                }
            }
            self.zeros.push(z);
            self.residuals.push(r);
        }
        Ok(())
    }
}

/// McMahon-type guess `(k + nu/2 - 1/4) pi` with its first correction.
fn mcmahon(nu: f64, k: usize) -> f64 {
    let beta = (k as f64 + 0.5 * nu - 0.25) * PI;
    let m = 4.0 * nu * nu;
    beta - (m - 1.0) / (8.0 * beta) - 4.0 * (m - 1.0) * (7.0 * m - 31.0) / (3.0 * (8.0 * beta).powi(3))
}

fn next_zero(nu: f64, k: usize, prev: Option<f64>) -> Result<(f64, f64)> {
    let lower = prev.unwrap_or(0.0);
    // For large indices the asymptotic guess is accurate enough to bracket directly.
    if k >= 8 {
        let g = mcmahon(nu, k);
        let (a, b) = (g - 0.3, g + 0.3);
        if a > lower + 1.0 {
            let fa = j_unchecked(nu, a);
            let fb = j_unchecked(nu, b);
            if fa * fb < 0.0 {
                return refine(nu, a, b, fa);
            }
        }
    }
    // Scan forward from the previous zero.
    let mut a = if prev.is_some() {
        lower + 1e-3
    } else {
        nu.max(0.0) * 0.5 + 0.05
    };
    let mut fa = j_unchecked(nu, a);
    for _ in 0..100_000 {
        let b = a + SCAN_STEP;
        let fb = j_unchecked(nu, b);
        if fa == 0.0 {
            return Ok((a, 0.0));
        }
        if fa * fb < 0.0 {
            return refine(nu, a, b, fa);
        }
        a = b;
        fa = fb;
    }
    Err(Error::no_conv("bessel_zeros", format!("no sign change found for zero {k}")))
}

/// Safeguarded Newton iteration inside a sign-changing bracket.
fn refine(nu: f64, mut a: f64, mut b: f64, fa: f64) -> Result<(f64, f64)> {
    let sign_a = fa.signum();
    let mut x = 0.5 * (a + b);
    for _ in 0..ITERATION_CAP {
        let (j, j1) = j_pair_unchecked(nu, x);
        if j == 0.0 {
            return Ok((x, 0.0));
        }
        if j.signum() == sign_a {
            a = x;
        } else {
            b = x;
        }
        let deriv = nu / x * j - j1;
        let mut next = x - j / deriv;
        if !(next > a && next < b) || !next.is_finite() {
            next = 0.5 * (a + b);
        }
        let step = (next - x).abs();
        x = next;
        if step <= 4.0 * f64::EPSILON * x {
            let r = j_unchecked(nu, x).abs();
            if r < ZERO_TOLERANCE {
                return Ok((x, r));
            }
        }
        if b - a <= 4.0 * f64::EPSILON * x {
            let r = j_unchecked(nu, x).abs();
            if r < ZERO_TOLERANCE {
                return Ok((x, r));
            }
            break;
        }
    }
    let r = j_unchecked(nu, x).abs();
    if r < ZERO_TOLERANCE {
        return Ok((x, r));
    }
    Err(Error::no_conv(
        "bessel_zeros",
        format!("refinement stalled at x={x} with residual {r:e}"),
    ))
}

/// The first `count` positive zeros of `J_nu`.
pub fn bessel_zeros(order: Order, count: usize) -> Result<BesselZeroTable> {
    if count == 0 {
        return Err(Error::invalid("zero count must be at least 1"));
    }
    let mut table = BesselZeroTable {
        order,
        zeros: Vec::new(),
        residuals: Vec::new(),
    };
    table.extend_to(count)?;
    Ok(table)
}

fn cache() -> &'static Mutex<HashMap<u64, Arc<BesselZeroTable>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<BesselZeroTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared table holding at least `count` zeros; grown on demand and reused.
pub fn cached_zeros(order: Order, count: usize) -> Result<Arc<BesselZeroTable>> {
    if count == 0 {
        return Err(Error::invalid("zero count must be at least 1"));
    }
    let key = order.value().to_bits();
    let mut map = cache().lock().expect("zero cache poisoned");
    if let Some(t) = map.get(&key) {
        if t.len() >= count {
            return Ok(Arc::clone(t));
        }
    }
    let mut table = match map.get(&key) {
        Some(t) => (**t).clone(),
        None => BesselZeroTable {
            order,
            zeros: Vec::new(),
            residuals: Vec::new(),
        },
    };
    table.extend_to(count)?;
    let arc = Arc::new(table);
    map.insert(key, Arc::clone(&arc));
    Ok(arc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::ln_gamma;

    fn ord(nu: f64) -> Order {
        Order::new(nu).unwrap()
    }

    /// Independent oracle: plain f64 series of J_0 and bisection.
    fn j0_series(x: f64) -> f64 {
        let mut s = 0.0;
        for k in 0..60 {
            let kf = k as f64;
            let mag = (2.0 * kf * (0.5 * x).ln() - 2.0 * ln_gamma(kf + 1.0)).exp();
            s += if k % 2 == 0 { mag } else { -mag };
        }
        s
    }

    fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let fa = f(a);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(m).signum() == fa.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn order_zero_matches_bisection_oracle() {
        let z1 = bisect(j0_series, 2.0, 3.0);
        let z2 = bisect(j0_series, 5.0, 6.0);
        assert!((z1 - 2.404825557695773).abs() < 1e-12);
        assert!((z2 - 5.520078110286311).abs() < 1e-12);
        let t = bessel_zeros(ord(0.0), 2).unwrap();
        assert!((t.zeros()[0] - z1).abs() < 1e-10);
        assert!((t.zeros()[1] - z2).abs() < 1e-10);
    }

    #[test]
    fn half_order_zeros_are_multiples_of_pi() {
        let t = bessel_zeros(ord(0.5), 50).unwrap();
        for (i, z) in t.zeros().iter().enumerate() {
            assert!((z - (i + 1) as f64 * PI).abs() < 1e-10);
        }
    }

    #[test]
    fn first_zero_of_order_one() {
        let t = bessel_zeros(ord(1.0), 1).unwrap();
        assert!((t.zeros()[0] - 3.831705970207512).abs() < 1e-10);
    }

    #[test]
    fn zero_count_rejected() {
        assert!(bessel_zeros(ord(0.0), 0).is_err());
    }

    #[test]
    fn large_tables_stay_valid() {
        let t = bessel_zeros(ord(2.5), 3000).unwrap();
        for w in t.zeros().windows(2) {
            assert!(w[1] > w[0]);
        }
        assert!(t.residuals().iter().all(|&r| r < ZERO_TOLERANCE));
        for k in 20..t.len() - 1 {
            assert!((t.zeros()[k + 1] - t.zeros()[k] - PI).abs() < 0.05);
        }
    }

    #[test]
    fn cache_grows_and_reuses() {
        let a = cached_zeros(ord(0.25), 10).unwrap();
        let b = cached_zeros(ord(0.25), 5).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        let c = cached_zeros(ord(0.25), 40).unwrap();
        assert_eq!(c.len(), 40);
        assert_eq!(&c.zeros()[..10], a.zeros());
    }

    #[test]
    fn lookup_is_one_based() {
        let t = bessel_zeros(ord(0.5), 3).unwrap();
        assert!(t.get(0).is_err());
        assert!(t.get(4).is_err());
        assert!((t.get(3).unwrap() - 3.0 * PI).abs() < 1e-12);
    }
}
