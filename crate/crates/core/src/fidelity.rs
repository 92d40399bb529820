//! Conversions between probabilistic concentration and deterministic
//! transformations judged by fidelity, with numeric checks of the
//! constructions that underlie them.

use serde::Serialize;

use crate::distributions::SchmidtSpectrum;
use crate::error::{Error, Result};
use crate::finite::{deterministic_yield, optimal_probability};

/// Coefficients at or above `STRIP_CONSTANT / T` are projected out by the truncation protocol.
pub const STRIP_CONSTANT: f64 = 5.828_427_124_746_19; // (1 + sqrt 2)^2

/// Slack for the inequalities checked on concrete spectra.
pub const CHECK_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConversionDirection {
    ProbToFidelity,
    FidelityToProb,
}

/// A quantitative conversion between the two criteria.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityConversion {
    pub direction: ConversionDirection,
    pub input_size: u64,
    pub input_quality: f64,
    pub output_size: u64,
    pub output_quality_bound: f64,
}

fn check_probability(name: &'static str, value: f64, allow_zero: bool) -> Result<()> {
    let ok = value <= 1.0 && if allow_zero { value >= 0.0 } else { value > 0.0 };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidProbability { name, value })
    }
}

/// Fidelity to `Phi_T` reachable from `Phi_L` obtained with probability `P`: `P L / T`.
pub fn prob_to_fidelity(success_prob: f64, size: u64, target: u64) -> Result<f64> {
    check_probability("success probability", success_prob, false)?;
    if size == 0 {
        return Err(Error::SizeTooSmall { size });
    }
    if size > target {
        return Err(Error::SizeOrder { small: size, large: target });
    }
    Ok(success_prob * size as f64 / target as f64)
}

/// Output size `floor(T (1 - 6 eps) / 6)` and probability `1 - 6 eps` from fidelity `1 - eps` to `Phi_T`.
pub fn fidelity_to_prob_params(target: u64, eps: f64) -> Result<(u64, f64)> {
    if !(eps >= 0.0 && eps < 1.0 / 6.0) {
        return Err(Error::EpsTooLarge(eps));
    }
    let prob = 1.0 - 6.0 * eps;
    let size = (target as f64 * prob / 6.0).floor() as u64;
    if target < 7 || size == 0 {
        return Err(Error::SizeTooSmall { size: target });
    }
    Ok((size, prob))
}

impl FidelityConversion {
    pub fn from_probability(success_prob: f64, size: u64, target: u64) -> Result<Self> {
        Ok(FidelityConversion {
            direction: ConversionDirection::ProbToFidelity,
            input_size: size,
            input_quality: success_prob,
            output_size: target,
            output_quality_bound: prob_to_fidelity(success_prob, size, target)?,
        })
    }

    pub fn from_fidelity(target: u64, eps: f64) -> Result<Self> {
        let (size, prob) = fidelity_to_prob_params(target, eps)?;
        Ok(FidelityConversion {
            direction: ConversionDirection::FidelityToProb,
            input_size: target,
            input_quality: 1.0 - eps,
            output_size: size,
            output_quality_bound: prob,
        })
    }
}

/// `(sqrt(T F) - 1) / ln T` with the natural logarithm; negative when `T F < 1`.
pub fn low_fidelity_bound(target: u64, fidelity: f64) -> Result<f64> {
    if target < 2 {
        return Err(Error::SizeTooSmall { size: target });
    }
    check_probability("fidelity", fidelity, false)?;
    Ok(((target as f64 * fidelity).sqrt() - 1.0) / (target as f64).ln())
}

/// Best fidelity of `p` to `Phi_T` in the aligned Schmidt basis: `(sum_{i<=T} sqrt p_i)^2 / T`.
pub fn aligned_fidelity(p: &SchmidtSpectrum, target: usize) -> f64 {
    let s: f64 = p.probs().iter().take(target).map(|v| v.sqrt()).sum();
    (s * s / target as f64).min(1.0)
}

fn check_target(p: &SchmidtSpectrum, target: usize, min: usize) -> Result<()> {
    if target < min || target > p.dim() {
        return Err(Error::SizeOutOfRange { size: target as u64, min: min as u64, max: p.dim() as u64 });
    }
    Ok(())
}

/// Outcome of the threshold scan behind the low-fidelity bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowFidelityCheck {
    pub target: usize,
    pub fidelity: f64,
    pub bound: f64,
    /// Largest `sqrt(P L)` over the scanned thresholds.
    pub best_sqrt_pl: f64,
    pub best_size: usize,
    pub best_prob: f64,
    pub holds: bool,
}

/// Scans truncation thresholds `t = p_k` and checks `max sqrt(P L) >= (sqrt(T F) - 1) / ln T`.
///
/// For each `k`, `L = floor(sum_i min(1, p_i / p_k))` capped at `min(T, d)` and
/// `P` is the optimal probability of reaching `Phi_L`.
pub fn check_low_fidelity_bound(p: &SchmidtSpectrum, target: usize) -> Result<LowFidelityCheck> {
    check_target(p, target, 2)?;
    let fidelity = aligned_fidelity(p, target);
    let bound = low_fidelity_bound(target as u64, fidelity)?;
    let cap = target.min(p.dim());
    let mut best = (f64::NEG_INFINITY, 1, 1.0);
    for k in 0..p.dim() {
        let t = p.probs()[k];
        let mass: f64 = p.probs().iter().map(|&v| (v / t).min(1.0)).sum();
        let size = ((mass * (1.0 + CHECK_SLACK)).floor() as usize).clamp(1, cap);
        let prob = optimal_probability(p, size)?;
        let value = (prob * size as f64).sqrt();
        if value > best.0 {
            best = (value, size, prob);
        }
    }
    Ok(LowFidelityCheck {
        target,
        fidelity,
        bound,
        best_sqrt_pl: best.0,
        best_size: best.1,
        best_prob: best.2,
        holds: best.0 >= bound - CHECK_SLACK,
    })
}

/// The truncation protocol run on a concrete spectrum, with its four checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationCheck {
    pub target: usize,
    pub eps: f64,
    /// Number of stripped coefficients.
    pub stripped: usize,
    /// Their total weight.
    pub delta: f64,
    pub remainder_largest: f64,
    pub remainder_yield: usize,
    pub output_size: u64,
    pub delta_within_budget: bool,
    pub remainder_flat_enough: bool,
    pub yield_reached: bool,
    pub probability_reached: bool,
}

impl TruncationCheck {
    pub fn all_hold(&self) -> bool {
        self.delta_within_budget && self.remainder_flat_enough && self.yield_reached && self.probability_reached
    }
}

/// Strips coefficients `>= (1 + sqrt 2)^2 / T`, renormalises, and concentrates deterministically.
///
/// Checks `delta <= 6 eps`, remainder largest `<= 6 / (T (1 - 6 eps))`,
/// deterministic yield `>= floor(T (1 - 6 eps) / 6)` and `1 - delta >= 1 - 6 eps`.
pub fn check_high_fidelity_truncation(p: &SchmidtSpectrum, target: usize) -> Result<TruncationCheck> {
    check_target(p, target, 1)?;
    let t = target as f64;
    let eps = (1.0 - aligned_fidelity(p, target)).max(0.0);
    if eps >= 1.0 / 6.0 {
        return Err(Error::EpsTooLarge(eps));
    }
    let cutoff = STRIP_CONSTANT / t;
    let stripped = p.probs().iter().take_while(|&&v| v >= cutoff).count();
    let delta: f64 = p.probs()[..stripped].iter().sum();
    let remainder = SchmidtSpectrum::from_positive(p.probs()[stripped..].to_vec());
    let output_size = (t * (1.0 - 6.0 * eps) / 6.0).floor() as u64;
    let remainder_yield = deterministic_yield(&remainder);
    Ok(TruncationCheck {
        target,
        eps,
        stripped,
        delta,
        remainder_largest: remainder.largest(),
        remainder_yield,
        output_size,
        delta_within_budget: delta <= 6.0 * eps + CHECK_SLACK,
        remainder_flat_enough: remainder.largest() <= 6.0 / (t * (1.0 - 6.0 * eps)) * (1.0 + CHECK_SLACK),
        yield_reached: remainder_yield as u64 >= output_size,
        probability_reached: 1.0 - delta >= 1.0 - 6.0 * eps - CHECK_SLACK,
    })
}
