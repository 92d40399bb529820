//! Asymptotic yield as a function of the error exponent.
//!
//! `E(r) = min_{D(q||p) <= r} [D(q||p) + H(q)]` (failure exponent `r`) and
//! `E*(r) = max_{D(q||p) <= r} H(q)` (success exponent `r`). Both optimisers
//! lie on the tilted family `h(s)`, with `s > 1` for `E` and `0 < s < 1` for
//! `E*`, which is how the curves are evaluated here. The simplex oracles in
//! [`oracle`] compute the same quantities without the tilt.

mod composite;
mod oracle;

pub use composite::{nonadditivity_report, NonAdditivityReport};
pub use oracle::{brute_force_converse, brute_force_direct, MIN_GRID_STEPS, ORACLE_MAX_DIM};

use serde::Serialize;

use crate::distributions::{
    psi_derivatives, shannon_entropy, solve_tilt_above, solve_tilt_below, tilted_divergence, tilted_entropy,
    SchmidtSpectrum, TiltSolution, TILT_CAP,
};
use crate::error::{Error, Result};
use crate::roots::bisect;

/// Step of the central difference used to locate `r'`.
pub const SLOPE_STEP: f64 = 1e-6;

/// Accepted `|dE*/dr - 1|` at the located `r'`.
pub const SLOPE_TOLERANCE: f64 = 1e-8;

/// Which branch produced a curve value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveRegime {
    /// Attained by the tilted distribution at `s_star`.
    Interior,
    /// `E(r) = -log2 p_1` for `r` at or beyond the direct saturation point.
    SaturatedDeterministic,
    /// `E*(r) = log2 d` for `r >= c`.
    SaturatedMaximal,
    /// The slope-one segment of `E*_F` past `r'`.
    Linear,
}

/// One point `(r, yield)` of a yield curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateCurvePoint {
    pub r: f64,
    pub yield_bits: f64,
    pub regime: CurveRegime,
    pub s_star: Option<f64>,
}

fn check_exponent(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveExponent(r))
    }
}

/// `E(r)`: Bell pairs per copy when the failure probability decays as `2^{-nr}`.
///
/// In the interior, `E = -psi'(s) + (r - F(s)) / (1 - s)` with `F(s) = r`; the
/// second term only absorbs the residual of the tilt solve.
pub fn direct_yield(p: &SchmidtSpectrum, r: f64) -> Result<RateCurvePoint> {
    check_exponent(r)?;
    match solve_tilt_above(p, r)? {
        TiltSolution::Saturated => {
            Ok(RateCurvePoint { r, yield_bits: p.min_entropy(), regime: CurveRegime::SaturatedDeterministic, s_star: None })
        }
        TiltSolution::Interior(s) => {
            let f = tilted_divergence(p, s);
            let value = -psi_derivatives(p, s).first + (r - f) / (1.0 - s);
            Ok(RateCurvePoint { r, yield_bits: value, regime: CurveRegime::Interior, s_star: Some(s) })
        }
    }
}

/// `E*(r)`: Bell pairs per copy when the success probability decays as `2^{-nr}`.
///
/// In the interior, `E* = H(h(s)) + s (r - F(s)) / (1 - s)` with `F(s) = r`.
pub fn converse_yield(p: &SchmidtSpectrum, r: f64) -> Result<RateCurvePoint> {
    check_exponent(r)?;
    match solve_tilt_below(p, r)? {
        TiltSolution::Saturated => {
            Ok(RateCurvePoint { r, yield_bits: p.log2_dim(), regime: CurveRegime::SaturatedMaximal, s_star: None })
        }
        TiltSolution::Interior(s) => {
            let f = tilted_divergence(p, s);
            let value = tilted_entropy(p, s) + s * (r - f) / (1.0 - s);
            Ok(RateCurvePoint { r, yield_bits: value, regime: CurveRegime::Interior, s_star: Some(s) })
        }
    }
}

/// `E_F(r)`, the direct yield under a fidelity criterion. It coincides with `E(r)`.
pub fn fidelity_direct_yield(p: &SchmidtSpectrum, r: f64) -> Result<RateCurvePoint> {
    direct_yield(p, r)
}

/// The point where `E*` has slope one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RPrime {
    pub value: f64,
    /// Set for uniform spectra, where `E*` is flat and `value` is 0 by convention.
    pub degenerate: bool,
}

fn converse_slope(p: &SchmidtSpectrum, r: f64) -> f64 {
    let up = converse_yield(p, r + SLOPE_STEP).map(|v| v.yield_bits).unwrap_or(f64::NAN);
    let down = converse_yield(p, r - SLOPE_STEP).map(|v| v.yield_bits).unwrap_or(f64::NAN);
    (up - down) / (2.0 * SLOPE_STEP)
}

/// `r'` with `dE*/dr (r') = 1`, by bisection on a central-difference slope.
///
/// The slope falls from `+inf` at `r = 0` to `0` at `r = c`. When `c` is too
/// small to fit the difference stencil, the envelope value `F(1/2)` is used.
pub fn r_prime(p: &SchmidtSpectrum) -> RPrime {
    if p.is_uniform() {
        return RPrime { value: 0.0, degenerate: true };
    }
    let c = p.uniform_divergence();
    let (lo, hi) = (2.0 * SLOPE_STEP, c - 2.0 * SLOPE_STEP);
    if hi <= lo || converse_slope(p, lo) < 1.0 || converse_slope(p, hi) > 1.0 {
        return RPrime { value: tilted_divergence(p, 0.5), degenerate: false };
    }
    let value = bisect(|r| converse_slope(p, r), lo, hi, 1.0, false, SLOPE_TOLERANCE);
    RPrime { value, degenerate: false }
}

/// `E*_F` for one spectrum with `r'` and `E*(r')` computed once.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityConverseCurve {
    spectrum: SchmidtSpectrum,
    r_prime: RPrime,
    yield_at_r_prime: f64,
}

impl FidelityConverseCurve {
    pub fn new(p: &SchmidtSpectrum) -> Self {
        let r_prime = r_prime(p);
        let yield_at_r_prime = if r_prime.degenerate {
            p.log2_dim()
        } else {
            converse_yield(p, r_prime.value).map(|v| v.yield_bits).unwrap_or_else(|_| p.log2_dim())
        };
        FidelityConverseCurve { spectrum: p.clone(), r_prime, yield_at_r_prime }
    }

    pub fn r_prime(&self) -> RPrime {
        self.r_prime
    }

    /// `E*_F(r) = sup_{0 < x <= r} [E*(x) + r - x]`: `E*(r)` up to `r'`, then
    /// the tangent line `r - r' + E*(r')`.
    pub fn eval(&self, r: f64) -> Result<RateCurvePoint> {
        check_exponent(r)?;
        if r <= self.r_prime.value {
            return converse_yield(&self.spectrum, r);
        }
        let line = r - self.r_prime.value + self.yield_at_r_prime;
        let curve = converse_yield(&self.spectrum, r)?;
        if curve.yield_bits > line {
            return Ok(curve);
        }
        Ok(RateCurvePoint { r, yield_bits: line, regime: CurveRegime::Linear, s_star: None })
    }
}

/// `E*_F(r)`, the strong-converse yield under a fidelity criterion.
pub fn fidelity_converse_yield(p: &SchmidtSpectrum, r: f64) -> Result<RateCurvePoint> {
    FidelityConverseCurve::new(p).eval(r)
}

/// Inverse of `E` on `[-log2 p_1, H(p))`: the failure exponent reaching rate `rate`.
///
/// Solves `D(h(s)||p) + H(h(s)) = -psi'(s) = rate` for `s > 1` and returns `F(s)`.
pub fn inverse_direct(p: &SchmidtSpectrum, rate: f64) -> Result<f64> {
    let (lo, hi) = (p.min_entropy(), shannon_entropy(p));
    if p.is_uniform() || !(rate >= lo && rate < hi) {
        return Err(Error::RateOutOfRange { rate, lo, hi });
    }
    if rate <= lo {
        return Ok(p.direct_saturation());
    }
    let objective = |s: f64| -psi_derivatives(p, s).first;
    let mut upper = 2.0;
    while objective(upper) > rate {
        upper *= 2.0;
        if upper > TILT_CAP {
            return Err(Error::BracketExceeded { target: rate, cap: TILT_CAP });
        }
    }
    let s = bisect(objective, 1.0, upper, rate, false, 1e-15);
    Ok(tilted_divergence(p, s))
}

/// Inverse of `E*` on `(H(p), log2 d)`: the success exponent reaching rate `rate`.
///
/// `E*(F(s)) = H(h(s))` on `0 < s < 1`, so this solves `H(h(s)) = rate` and
/// returns `F(s)`. `H(h(s))` falls from `log2 d` at `s = 0` to `H(p)` at `s = 1`.
pub fn inverse_converse(p: &SchmidtSpectrum, rate: f64) -> Result<f64> {
    let (lo, hi) = (shannon_entropy(p), p.log2_dim());
    if p.is_uniform() || !(rate > lo && rate < hi) {
        return Err(Error::RateOutOfRange { rate, lo, hi });
    }
    let s = bisect(|s| tilted_entropy(p, s), 0.0, 1.0, rate, false, 1e-15);
    Ok(tilted_divergence(p, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sp(v: &[f64]) -> SchmidtSpectrum {
        SchmidtSpectrum::new(v).unwrap()
    }

    const MINENT_3_1: f64 = 0.415_037_499_278_843_8;
    const H_3_1: f64 = 0.811_278_124_459_132_9;
    const C_3_1: f64 = 0.207_518_749_639_421_9;

    #[test]
    fn uniform_curves_are_flat() {
        let u = sp(&[0.5, 0.5]);
        for r in [1e-6, 0.3, 5.0] {
            assert_eq!(direct_yield(&u, r).unwrap().yield_bits, 1.0);
            assert_eq!(converse_yield(&u, r).unwrap().yield_bits, 1.0);
            assert_eq!(fidelity_direct_yield(&u, r).unwrap().yield_bits, 1.0);
        }
    }

    #[test]
    fn saturation_values() {
        let p = sp(&[0.75, 0.25]);
        let d = direct_yield(&p, 1.0).unwrap();
        assert_eq!(d.yield_bits, MINENT_3_1);
        assert_eq!(d.regime, CurveRegime::SaturatedDeterministic);
        let c = converse_yield(&p, C_3_1 + 1e-12).unwrap();
        assert_eq!((c.yield_bits, c.regime), (1.0, CurveRegime::SaturatedMaximal));
    }

    #[test]
    fn interior_points_solve_the_tilt() {
        let p = sp(&[0.6, 0.3, 0.1]);
        for r in [0.01, 0.1, 0.3] {
            let pt = direct_yield(&p, r).unwrap();
            assert_abs_diff_eq!(tilted_divergence(&p, pt.s_star.unwrap()), r, epsilon = 1e-10);
            let pt = converse_yield(&p, r / 4.0).unwrap();
            assert_abs_diff_eq!(tilted_divergence(&p, pt.s_star.unwrap()), r / 4.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn small_exponent_limit() {
        // The deviation from H(p) shrinks like sqrt(2 r psi''(1)).
        let p = sp(&[0.75, 0.25]);
        let psi2 = psi_derivatives(&p, 1.0).second;
        for r in [1e-7, 1e-10] {
            let bound = 1.5 * (2.0 * r * psi2).sqrt();
            assert!((direct_yield(&p, r).unwrap().yield_bits - H_3_1).abs() <= bound);
            assert!((converse_yield(&p, r).unwrap().yield_bits - H_3_1).abs() <= bound);
        }
    }

    #[test]
    fn curves_are_monotone_and_bounded() {
        let p = sp(&[0.5, 0.3, 0.15, 0.05]);
        let h = shannon_entropy(&p);
        let sat = p.direct_saturation();
        let c = p.uniform_divergence();
        let direct: Vec<f64> =
            (1..100).map(|i| direct_yield(&p, sat * i as f64 / 100.0).unwrap().yield_bits).collect();
        assert!(direct.windows(2).all(|w| w[1] < w[0] + 1e-12));
        assert!(direct.iter().all(|&e| e >= p.min_entropy() - 1e-12 && e <= h + 1e-12));
        let conv: Vec<f64> = (1..100).map(|i| converse_yield(&p, c * i as f64 / 100.0).unwrap().yield_bits).collect();
        assert!(conv.windows(2).all(|w| w[1] > w[0] - 1e-12));
        assert!(conv.iter().all(|&e| e >= h - 1e-12 && e <= p.log2_dim() + 1e-12));
    }

    #[test]
    fn r_prime_matches_envelope_value() {
        for v in [[0.75, 0.25, 0.0], [0.6, 0.3, 0.1], [0.9, 0.05, 0.05]] {
            let p = SchmidtSpectrum::new(&v).unwrap();
            let rp = r_prime(&p);
            assert!(!rp.degenerate);
            assert!((converse_slope(&p, rp.value) - 1.0).abs() <= 1e-6);
            assert_abs_diff_eq!(rp.value, tilted_divergence(&p, 0.5), epsilon = 1e-6);
        }
        assert_eq!(r_prime(&sp(&[0.25; 4])), RPrime { value: 0.0, degenerate: true });
    }

    #[test]
    fn fidelity_converse_shape() {
        let p = sp(&[0.75, 0.25]);
        let curve = FidelityConverseCurve::new(&p);
        let rp = curve.r_prime().value;
        for r in [rp / 3.0, rp / 2.0, rp] {
            assert_abs_diff_eq!(
                curve.eval(r).unwrap().yield_bits,
                converse_yield(&p, r).unwrap().yield_bits,
                epsilon = 1e-8
            );
        }
        for r in [rp * 1.5, 0.5, 3.0] {
            let h = 1e-4;
            let slope = (curve.eval(r + h).unwrap().yield_bits - curve.eval(r - h).unwrap().yield_bits) / (2.0 * h);
            assert_abs_diff_eq!(slope, 1.0, epsilon = 1e-6);
            assert!(curve.eval(r).unwrap().yield_bits >= converse_yield(&p, r).unwrap().yield_bits);
        }
        let product = sp(&[1.0]);
        for r in [0.1, 1.0, 7.5] {
            assert_abs_diff_eq!(fidelity_converse_yield(&product, r).unwrap().yield_bits, r, epsilon = 1e-15);
        }
    }

    #[test]
    fn inverse_direct_round_trip_and_endpoints() {
        let p = sp(&[0.75, 0.25]);
        let r = inverse_direct(&p, 0.6).unwrap();
        assert_abs_diff_eq!(direct_yield(&p, r).unwrap().yield_bits, 0.6, epsilon = 1e-8);
        assert!(inverse_direct(&p, H_3_1 - 1e-9).unwrap() < 1e-6);
        assert_eq!(inverse_direct(&p, MINENT_3_1).unwrap(), MINENT_3_1);
        assert!(matches!(inverse_direct(&p, H_3_1), Err(Error::RateOutOfRange { .. })));
        assert!(matches!(inverse_direct(&p, 0.4), Err(Error::RateOutOfRange { .. })));
    }

    #[test]
    fn inverse_converse_round_trip_and_endpoints() {
        let p = sp(&[0.75, 0.25]);
        let r = inverse_converse(&p, 0.95).unwrap();
        assert_abs_diff_eq!(converse_yield(&p, r).unwrap().yield_bits, 0.95, epsilon = 1e-8);
        assert!(inverse_converse(&p, H_3_1 + 1e-9).unwrap() < 1e-6);
        assert_abs_diff_eq!(inverse_converse(&p, 1.0 - 1e-12).unwrap(), C_3_1, epsilon = 1e-5);
        assert!(matches!(inverse_converse(&p, 1.0), Err(Error::RateOutOfRange { .. })));
    }

    #[test]
    fn rejects_non_positive_exponents() {
        let p = sp(&[0.75, 0.25]);
        assert!(matches!(direct_yield(&p, 0.0), Err(Error::NonPositiveExponent(_))));
        assert!(matches!(converse_yield(&p, -1.0), Err(Error::NonPositiveExponent(_))));
        assert!(matches!(fidelity_converse_yield(&p, f64::NAN), Err(Error::NonPositiveExponent(_))));
    }
}
