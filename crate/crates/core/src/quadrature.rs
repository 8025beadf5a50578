//! Gauss-Legendre rules and composite panel helpers.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::legendre::GaussLegendre;

/// Nodes and weights on `[-1, 1]`, cached per degree.
pub fn gl_rule(n: usize) -> Arc<Vec<(f64, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("quadrature cache poisoned");
    if let Some(r) = map.get(&n) {
        return Arc::clone(r);
    }
    let degree = NonZeroUsize::new(n.max(1)).expect("positive degree");
    let mut pairs: Vec<(f64, f64)> = GaussLegendre::new(degree).as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let arc = Arc::new(pairs);
    map.insert(n, Arc::clone(&arc));
    arc
}

/// `int_a^b f` with one `n`-point panel.
pub fn integrate<F: FnMut(f64) -> f64>(a: f64, b: f64, n: usize, mut f: F) -> f64 {
    let rule = gl_rule(n);
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    h * rule.iter().map(|&(x, w)| w * f(m + h * x)).sum::<f64>()
}

/// `int f` over consecutive panels given by sorted breakpoints.
pub fn integrate_panels<F: FnMut(f64) -> f64>(breaks: &[f64], n: usize, mut f: F) -> f64 {
    breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| integrate(w[0], w[1], n, &mut f))
        .sum()
}

/// Append nodes and weights of an `n`-point rule on `[a, b]`.
pub fn push_panel(nodes: &mut Vec<f64>, weights: &mut Vec<f64>, a: f64, b: f64, n: usize) {
    if b <= a {
        return;
    }
    let rule = gl_rule(n);
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    for &(x, w) in rule.iter() {
        nodes.push(m + h * x);
        weights.push(h * w);
    }
}

/// Breakpoints of `[a, b]` graded geometrically toward `a` down to width `min_width`,
/// then uniform panels of width at most `max_width`.
pub fn graded_breaks(a: f64, b: f64, min_width: f64, ratio: f64, max_width: f64) -> Vec<f64> {
    let mut out = vec![a];
    let mut w = min_width.min(b - a);
    let mut x = a;
    while x + w < b {
        x += w;
        out.push(x);
        w = (w * ratio).min(max_width);
    }
    if *out.last().unwrap() < b {
        out.push(b);
    }
    out
}

/// Breakpoints of `[a, b]` refined geometrically toward both ends.
pub fn two_sided_breaks(a: f64, b: f64, min_width: f64, ratio: f64, max_width: f64) -> Vec<f64> {
    let mid = 0.5 * (a + b);
    let left = graded_breaks(a, mid, min_width, ratio, max_width);
    let right = graded_breaks(a, mid, min_width, ratio, max_width);
    let mut out = left;
    for &r in right.iter().rev().skip(1) {
        out.push(a + b - r);
    }
    out
}
