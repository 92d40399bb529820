//! Simplex oracles for `E` and `E*` that do not use the tilted family.
//!
//! For `d = 3` the simplex is cut into lines of constant `q_1` on a grid of
//! `grid_steps + 1` values. Along each line `D(q||p)` is convex, so its
//! feasible set `D <= r` is an interval whose ends are found by root finding;
//! `D + H = -sum q_i log2 p_i` is linear and `H` is concave along the line,
//! so both optima on the interval are explicit. The optimum per line is convex
//! (direct) or concave (converse) in `q_1`, so the best grid line is refined
//! by golden-section search. For `d = 2` the single line is the whole simplex.

use crate::distributions::SchmidtSpectrum;
use crate::error::{Error, Result};
use crate::roots::newton_bracketed;

/// Largest dimension the oracles accept.
pub const ORACLE_MAX_DIM: usize = 3;

/// Smallest accepted grid resolution.
pub const MIN_GRID_STEPS: usize = 1000;

fn xlog(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// `q = (prefix, x, m - x)`: the prefix coordinate is fixed and `x` varies in `[0, m]`.
struct Line {
    m: f64,
    log_a: f64,
    log_b: f64,
    /// `D` and `H` contributions of the fixed coordinate.
    prefix_d: f64,
    prefix_h: f64,
    prefix_cross: f64,
}

impl Line {
    fn divergence(&self, x: f64) -> f64 {
        let y = self.m - x;
        self.prefix_d + xlog(x) - x * self.log_a + xlog(y) - y * self.log_b
    }

    fn divergence_slope(&self, x: f64) -> f64 {
        (x.log2() - self.log_a) - ((self.m - x).log2() - self.log_b)
    }

    fn entropy(&self, x: f64) -> f64 {
        self.prefix_h - xlog(x) - xlog(self.m - x)
    }

    /// `D + H = -sum q_i log2 p_i`.
    fn cross_entropy(&self, x: f64) -> f64 {
        self.prefix_cross - x * self.log_a - (self.m - x) * self.log_b
    }

    /// Minimiser of `D` along the line.
    fn centre(&self) -> f64 {
        let (a, b) = (self.log_a.exp2(), self.log_b.exp2());
        self.m * a / (a + b)
    }

    /// `[lo, hi]` with `D <= r`, or `None` when the line misses the ball.
    fn feasible(&self, r: f64) -> Option<(f64, f64)> {
        let centre = self.centre();
        if self.divergence(centre) > r {
            return None;
        }
        let upper = if self.divergence(self.m) <= r {
            self.m
        } else {
            newton_bracketed(|x| (self.divergence(x) - r, self.divergence_slope(x)), centre, self.m)
        };
        let lower = if self.divergence(0.0) <= r {
            0.0
        } else {
            newton_bracketed(|x| (r - self.divergence(x), -self.divergence_slope(x)), 0.0, centre)
        };
        Some((lower, upper))
    }
}

fn check_oracle_args(p: &SchmidtSpectrum, grid_steps: usize) -> Result<()> {
    let d = p.dim();
    if d > ORACLE_MAX_DIM {
        return Err(Error::DimensionTooLarge { dim: d, max: ORACLE_MAX_DIM });
    }
    if grid_steps < MIN_GRID_STEPS {
        return Err(Error::GridTooCoarse { steps: grid_steps, min: MIN_GRID_STEPS });
    }
    Ok(())
}

/// The line `q_1 = q1` of a three-dimensional simplex.
fn line_at(logs: &[f64], q1: f64) -> Line {
    Line {
        m: 1.0 - q1,
        log_a: logs[1],
        log_b: logs[2],
        prefix_d: xlog(q1) - q1 * logs[0],
        prefix_h: -xlog(q1),
        prefix_cross: -q1 * logs[0],
    }
}

#[cfg(test)]
fn lines(p: &SchmidtSpectrum, grid_steps: usize) -> Result<Vec<Line>> {
    check_oracle_args(p, grid_steps)?;
    let logs = p.log2_probs();
    Ok((0..=grid_steps).map(|i| line_at(&logs, i as f64 / grid_steps as f64)).collect())
}

const GOLDEN_ITERATIONS: usize = 120;

/// Minimises `f` over the grid `q_1 = i / steps`, then refines by golden-section
/// search on the two cells around the best grid point.
///
/// `f` is convex in `q_1` where finite and `+inf` off the feasible interval,
/// so the refinement stays inside that interval.
fn minimise_over_q1(steps: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = 1.0 / steps as f64;
    let (best_i, best) = (0..=steps)
        .map(|i| (i, f(i as f64 * h)))
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    if !best.is_finite() {
        return best;
    }
    let centre = best_i as f64 * h;
    let (mut lo, mut hi) = ((centre - h).max(0.0), (centre + h).min(1.0));
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut found = best;
    for _ in 0..GOLDEN_ITERATIONS {
        let c = hi - ratio * (hi - lo);
        let d = lo + ratio * (hi - lo);
        let (fc, fd) = (f(c), f(d));
        found = found.min(fc).min(fd);
        if fc.is_infinite() && fd.is_infinite() {
            (lo, hi) = (c, d);
        } else if fc <= fd {
            hi = d;
        } else {
            lo = c;
        }
    }
    found
}

/// `min { D(q||p) + H(q) : D(q||p) <= r }` over the simplex.
pub fn brute_force_direct(p: &SchmidtSpectrum, r: f64, grid_steps: usize) -> Result<f64> {
    check_oracle_args(p, grid_steps)?;
    let logs = p.log2_probs();
    let on_line = |line: &Line| match line.feasible(r) {
        Some((lo, hi)) => line.cross_entropy(lo).min(line.cross_entropy(hi)),
        None => f64::INFINITY,
    };
    Ok(match p.dim() {
        1 => 0.0,
        2 => on_line(&Line { m: 1.0, log_a: logs[0], log_b: logs[1], prefix_d: 0.0, prefix_h: 0.0, prefix_cross: 0.0 }),
        _ => minimise_over_q1(grid_steps, |q1| on_line(&line_at(&logs, q1))),
    })
}

/// `max { H(q) : D(q||p) <= r }` over the simplex.
pub fn brute_force_converse(p: &SchmidtSpectrum, r: f64, grid_steps: usize) -> Result<f64> {
    check_oracle_args(p, grid_steps)?;
    let logs = p.log2_probs();
    let on_line = |line: &Line| match line.feasible(r) {
        Some((lo, hi)) => -line.entropy((0.5 * line.m).clamp(lo, hi)),
        None => f64::INFINITY,
    };
    Ok(match p.dim() {
        1 => 0.0,
        2 => -on_line(&Line { m: 1.0, log_a: logs[0], log_b: logs[1], prefix_d: 0.0, prefix_h: 0.0, prefix_cross: 0.0 }),
        _ => -minimise_over_q1(grid_steps, |q1| on_line(&line_at(&logs, q1))),
    })
}
