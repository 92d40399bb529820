//! Base-2 log-space arithmetic.
//!
//! Every n-copy probability is carried as its `log2`. Sums go through
//! log-sum-exp, differences through `expm1`, so quantities of size
//! `2^-4000` stay representable.

use std::f64::consts::LN_2;

/// `log2(2^a + 2^b)`.
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + ((lo - hi) * LN_2).exp().ln_1p() / LN_2
}

/// `log2(2^a - 2^b)` for `a >= b`. Returns `-inf` when the difference vanishes.
pub fn log_sub(a: f64, b: f64) -> f64 {
    debug_assert!(a >= b || (a - b).abs() < 1e-9, "log_sub with a < b: {a} < {b}");
    if b == f64::NEG_INFINITY {
        return a;
    }
    if b >= a {
        return f64::NEG_INFINITY;
    }
    a + (-((b - a) * LN_2).exp_m1()).ln() / LN_2
}

/// `log2(sum_i 2^x_i)` over an iterator, in iteration order.
pub fn log_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let values: Vec<f64> = values.into_iter().collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let total: f64 = values.iter().map(|v| (v - max).exp2()).sum();
    max + total.log2()
}

/// Asymptotic exponent of a sum of two exponentials.
///
/// `-(1/n) log2(2^{-n a} + 2^{-n b})` tends to `min(a, b)` as `n` grows, which
/// is the reduction rule used whenever two exponentially small terms are added.
pub fn exponent_of_log_sum(a: f64, b: f64) -> f64 {
    a.min(b)
}
