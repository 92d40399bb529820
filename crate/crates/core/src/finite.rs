//! Single-copy concentration into a maximally entangled state of size `L`.
//!
//! Two routes to the same optimum: [`optimal_probability`] minimises over the
//! cut index directly, while [`solve_plan`] finds the truncation threshold `t`
//! solving `L = sum_i min(1, p_i / t)` and reports `P = t L`.

use serde::Serialize;

use crate::distributions::SchmidtSpectrum;
use crate::error::{Error, Result};

/// Relative slack used when `1 / p_1` lands on an integer up to rounding.
const INTEGER_SLACK: f64 = 1e-12;

/// The solved two-outcome truncation protocol.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationPlan {
    pub target_size: usize,
    pub threshold: f64,
    /// 1-based index of the first coefficient not above the threshold.
    pub cut_index: usize,
    pub success_prob: f64,
    /// Diagonal of the success operator, `min(1, sqrt(t / p_i))`.
    pub measurement_coeffs: Vec<f64>,
}

impl ConcentrationPlan {
    pub fn failure_prob(&self) -> f64 {
        1.0 - self.success_prob
    }

    /// Spectrum after the successful outcome: `min(t, p_i) / P`.
    ///
    /// The leading `cut_index - 1` entries all equal `t / P = 1 / L`.
    pub fn post_measurement_spectrum(&self, p: &SchmidtSpectrum) -> SchmidtSpectrum {
        let level = 1.0 / self.target_size as f64;
        let probs = p
            .probs()
            .iter()
            .enumerate()
            .map(|(i, &pi)| if i + 1 < self.cut_index { level } else { pi / self.success_prob })
            .collect();
        SchmidtSpectrum::from_positive(probs)
    }
}

fn check_size(p: &SchmidtSpectrum, size: usize) -> Result<()> {
    if size < 1 || size > p.dim() {
        return Err(Error::SizeOutOfRange { size: size as u64, min: 1, max: p.dim() as u64 });
    }
    Ok(())
}

/// `tails[l] = sum_{i >= l} p_i` (0-based), with `tails[d] = 0`.
fn tail_sums(p: &SchmidtSpectrum) -> Vec<f64> {
    let mut tails = vec![0.0; p.dim() + 1];
    for i in (0..p.dim()).rev() {
        tails[i] = tails[i + 1] + p.probs()[i];
    }
    tails
}

/// Optimal probability of reaching `Phi_L`: `min_{l in [1, L]} L / (L - l + 1) * sum_{i >= l} p_i`.
pub fn optimal_probability(p: &SchmidtSpectrum, size: usize) -> Result<f64> {
    check_size(p, size)?;
    let tails = tail_sums(p);
    let l = size as f64;
    let best = (0..size)
        .map(|k| l / (l - k as f64) * tails[k])
        .fold(f64::INFINITY, f64::min);
    Ok(best.min(1.0))
}

/// 1-based index attaining the minimum in [`optimal_probability`] (smallest on ties).
pub fn optimal_cut_index(p: &SchmidtSpectrum, size: usize) -> Result<usize> {
    check_size(p, size)?;
    let tails = tail_sums(p);
    let l = size as f64;
    let values: Vec<f64> = (0..size).map(|k| l / (l - k as f64) * tails[k]).collect();
    let best = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(values.iter().position(|&v| v <= best * (1.0 + 1e-12)).unwrap() + 1)
}

/// Solves the truncation threshold for target size `size`.
///
/// With `k` coefficients strictly above `t`, the defining equation is linear:
/// `t = (sum_{i > k} p_i) / (L - k)`. The scan picks the `k` whose solution
/// respects `p_k > t >= p_{k+1}`. In the deterministic regime
/// (`L <= 1 / p_1`) this gives `k = 0`, `t = 1 / L` and `P = 1`.
pub fn solve_plan(p: &SchmidtSpectrum, size: usize) -> Result<ConcentrationPlan> {
    check_size(p, size)?;
    let probs = p.probs();
    let tails = tail_sums(p);
    let l = size as f64;
    let candidate = |k: usize| tails[k] / (l - k as f64);

    let exact = (0..size).find(|&k| {
        let t = candidate(k);
        (k == 0 || probs[k - 1] > t) && t >= probs[k]
    });
    // Ties between t and a coefficient can defeat the strict test by one ulp.
    let k = exact.unwrap_or_else(|| {
        let violation = |k: usize| {
            let t = candidate(k);
            let above = if k == 0 { 0.0 } else { (t - probs[k - 1]).max(0.0) };
            (above + (probs[k] - t).max(0.0)) / t
        };
        (0..size).min_by(|&a, &b| violation(a).total_cmp(&violation(b))).unwrap()
    });
    // With nothing above the threshold the whole mass is kept: t = 1 / L, P = 1.
    let (threshold, success_prob) = if k == 0 { (1.0 / l, 1.0) } else { (candidate(k), (candidate(k) * l).min(1.0)) };
    let measurement_coeffs = probs.iter().map(|&pi| (threshold / pi).sqrt().min(1.0)).collect();
    Ok(ConcentrationPlan { target_size: size, threshold, cut_index: k + 1, success_prob, measurement_coeffs })
}

/// `floor(1 / p_1)`: the largest size reachable with certainty.
pub fn deterministic_yield(p: &SchmidtSpectrum) -> usize {
    ((1.0 / p.largest()) * (1.0 + INTEGER_SLACK)).floor() as usize
}
