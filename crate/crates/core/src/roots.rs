//! Bisection on monotone scalar functions.

pub(crate) const MAX_ITERATIONS: usize = 200;

/// Finds `x` in `[lo, hi]` with `f(x) = target` for a monotone `f`.
///
/// `increasing` states the direction of monotonicity. Iteration stops when
/// `|f(x) - target| <= tol`, when the bracket collapses to adjacent floats,
/// or after [`MAX_ITERATIONS`] halvings. The caller guarantees the bracket.
pub(crate) fn bisect<F>(f: F, mut lo: f64, mut hi: f64, target: f64, increasing: bool, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let mut best = 0.5 * (lo + hi);
    let mut best_err = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let value = f(mid);
        let err = (value - target).abs();
        if err < best_err {
            best = mid;
            best_err = err;
        }
        if err <= tol {
            return mid;
        }
        if (value < target) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    best
}

/// Root of an increasing `f` on `[lo, hi]` with `f(lo) <= 0 <= f(hi)`.
///
/// `f` returns the value and derivative. Newton steps that leave the bracket
/// or stall fall back to bisection.
pub(crate) fn newton_bracketed<F>(f: F, mut lo: f64, mut hi: f64) -> f64
where
    F: Fn(f64) -> (f64, f64),
{
    let mut x = 0.5 * (lo + hi);
    let mut width = hi - lo;
    for _ in 0..MAX_ITERATIONS {
        let (value, slope) = f(x);
        if value == 0.0 {
            return x;
        }
        if value < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - value / slope;
        let next = if newton.is_finite() && newton > lo && newton < hi && (newton - x).abs() < 0.5 * width {
            newton
        } else {
            0.5 * (lo + hi)
        };
        width = (next - x).abs();
        if width <= 1e-15 * x.abs().max(1e-300) || next <= lo || next >= hi {
            return next.clamp(lo, hi);
        }
        x = next;
    }
    x
}
