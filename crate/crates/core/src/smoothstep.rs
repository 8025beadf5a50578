//! Degree-5 smoothstep `S(u) = 6u^5 - 15u^4 + 10u^3` clamped to `[0, 1]`, with two
//! continuous derivatives.

pub fn value(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        u * u * u * (u * (6.0 * u - 15.0) + 10.0)
    }
}

pub fn first(u: f64) -> f64 {
    if !(0.0..=1.0).contains(&u) {
        return 0.0;
    }
    30.0 * u * u * (u - 1.0) * (u - 1.0)
}

pub fn second(u: f64) -> f64 {
    if !(0.0..=1.0).contains(&u) {
        return 0.0;
    }
    60.0 * u * (u - 1.0) * (2.0 * u - 1.0)
}

/// Largest value of `|S'|`, reached at `u = 1/2`.
pub const MAX_FIRST: f64 = 1.875;
