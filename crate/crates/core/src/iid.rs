//! Exact quantities for `n` identical copies.
//!
//! The `d^n` coefficients of the product spectrum take one value per type, so
//! the whole computation runs over groups of equal sequence probability. The
//! truncation threshold and both `P` and `1 - P` stay in log space.

use serde::Serialize;

use crate::distributions::{entropy_of, relative_entropy, shannon_entropy, SchmidtSpectrum};
use crate::error::{Error, Result};
use crate::logspace::{log_add, log_sub, log_sum};
use crate::types::{enumerate_types, log2_factorial, log_sequence_prob, log_type_class_size, TypeComposition};
use crate::util::ordered_map;

/// Relative tolerance under which two sequence log-probabilities are merged.
pub const GROUP_MERGE_TOLERANCE: f64 = 1e-12;

/// Above this many bits `L` is carried as a real `2^{log2 L}` instead of an integer.
const EXACT_SIZE_BITS: f64 = 52.0;

/// One set of sequences sharing the same probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Group {
    /// `log2` probability of each sequence in the group.
    pub log_prob: f64,
    /// `log2` of the number of sequences.
    pub log_multiplicity: f64,
}

impl Group {
    /// `log2` of the total mass of the group.
    pub fn log_mass(&self) -> f64 {
        self.log_prob + self.log_multiplicity
    }
}

/// The spectrum of `n` copies, grouped by sequence probability (descending).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupedSpectrum {
    pub groups: Vec<Group>,
    pub n: u64,
    pub total_log_dim: f64,
}

impl GroupedSpectrum {
    /// `log2` of the total mass; zero up to rounding.
    pub fn log_total_mass(&self) -> f64 {
        log_sum(self.groups.iter().map(Group::log_mass))
    }
}

fn merge_groups(mut raw: Vec<Group>) -> Vec<Group> {
    raw.sort_by(|a, b| b.log_prob.total_cmp(&a.log_prob));
    let mut merged: Vec<Group> = Vec::with_capacity(raw.len());
    for g in raw {
        match merged.last_mut() {
            Some(last)
                if (last.log_prob - g.log_prob).abs() <= GROUP_MERGE_TOLERANCE * last.log_prob.abs().max(1.0) =>
            {
                last.log_multiplicity = log_add(last.log_multiplicity, g.log_multiplicity);
            }
            _ => merged.push(g),
        }
    }
    merged
}

/// Groups the `n`-copy spectrum by sequence probability.
///
/// Two-level spectra iterate `k = 0..=n` directly; larger spectra go through
/// type enumeration and inherit its size guard.
pub fn grouped_spectrum(p: &SchmidtSpectrum, n: u64) -> Result<GroupedSpectrum> {
    if n == 0 {
        return Err(Error::InvalidConfig("number of copies must be at least 1".into()));
    }
    let logs = p.log2_probs();
    let raw = match logs.len() {
        1 => vec![Group { log_prob: 0.0, log_multiplicity: 0.0 }],
        2 => {
            let log_n_fact = log2_factorial(n);
            (0..=n)
                .map(|k| Group {
                    log_prob: (n - k) as f64 * logs[0] + k as f64 * logs[1],
                    log_multiplicity: (log_n_fact - log2_factorial(k) - log2_factorial(n - k)).max(0.0),
                })
                .collect()
        }
        _ => enumerate_types(n, logs.len())?
            .map(|t| Group { log_prob: log_sequence_prob(&t, p).unwrap(), log_multiplicity: log_type_class_size(&t) })
            .collect(),
    };
    Ok(GroupedSpectrum { groups: merge_groups(raw), n, total_log_dim: n as f64 * p.log2_dim() })
}

/// Exact `n`-copy optimum for one target size, all in `log2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactOutcome {
    /// `log2 L` actually used (after rounding to an integer when representable).
    pub log2_size: f64,
    pub log_threshold: f64,
    pub log_success: f64,
    pub log_failure: f64,
}

/// Rounds a requested `log2 L` to the size actually used.
///
/// Below 52 bits `L = round(2^{log2 L})` is exact; above, `log2 L` is kept.
pub fn target_log_size(log2_size: f64) -> f64 {
    if log2_size < EXACT_SIZE_BITS {
        log2_size.exp2().round().max(1.0).log2()
    } else {
        log2_size
    }
}

impl GroupedSpectrum {
    /// Threshold, success and failure probabilities for a target of `2^{log2_size}`.
    ///
    /// With `C_k` sequences in the groups before `k` and `M_k` the mass from
    /// group `k` on, the threshold is `t = min_k M_k / (L - C_k)` over `C_k < L`.
    /// Inside a group the ratio is monotone, so group boundaries suffice.
    pub fn success_probability(&self, log2_size: f64) -> Result<ExactOutcome> {
        let slack = 1e-9 * self.total_log_dim.max(1.0);
        if !(log2_size >= 0.0) || log2_size > self.total_log_dim + slack {
            return Err(Error::SizeOutOfRange {
                size: log2_size.exp2().min(u64::MAX as f64) as u64,
                min: 1,
                max: self.total_log_dim.exp2().min(u64::MAX as f64) as u64,
            });
        }
        let log_l = target_log_size(log2_size.min(self.total_log_dim));

        let mut suffix = vec![f64::NEG_INFINITY; self.groups.len() + 1];
        for (k, g) in self.groups.iter().enumerate().rev() {
            suffix[k] = log_add(suffix[k + 1], g.log_mass());
        }

        let mut log_t = f64::INFINITY;
        let mut log_count = f64::NEG_INFINITY;
        for (k, g) in self.groups.iter().enumerate() {
            if log_count >= log_l {
                break;
            }
            let room = log_sub(log_l, log_count);
            if room > f64::NEG_INFINITY {
                log_t = log_t.min(suffix[k] - room);
            }
            log_count = log_add(log_count, g.log_multiplicity);
        }

        let log_success = (log_t + log_l).min(0.0);
        let log_failure = log_sum(
            self.groups
                .iter()
                .take_while(|g| g.log_prob > log_t)
                .map(|g| g.log_multiplicity + log_sub(g.log_prob, log_t)),
        );
        Ok(ExactOutcome { log2_size: log_l, log_threshold: log_t, log_success, log_failure })
    }
}

/// `(log2 P, log2 (1 - P))` for `n` copies and target `L = 2^{log2_size}`.
pub fn exact_success_prob(p: &SchmidtSpectrum, n: u64, log2_size: f64) -> Result<(f64, f64)> {
    let outcome = grouped_spectrum(p, n)?.success_probability(log2_size)?;
    Ok((outcome.log_success, outcome.log_failure))
}

/// Which side of `H(p)` the per-copy rate sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `-log2 p_1 < R < H(p)`: failure probability vanishes exponentially.
    Direct,
    /// `H(p) < R < log2 d`: success probability vanishes exponentially.
    Converse,
}

impl Regime {
    /// Open interval of admissible rates.
    pub fn rate_interval(self, p: &SchmidtSpectrum) -> (f64, f64) {
        let h = shannon_entropy(p);
        match self {
            Regime::Direct => (p.min_entropy(), h),
            Regime::Converse => (h, p.log2_dim()),
        }
    }

    pub fn check_rate(self, p: &SchmidtSpectrum, rate: f64) -> Result<()> {
        let (lo, hi) = self.rate_interval(p);
        if rate > lo && rate < hi {
            Ok(())
        } else {
            Err(Error::RateOutOfRange { rate, lo, hi })
        }
    }
}

/// Finite-`n` exponents at one number of copies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentSample {
    pub n: u64,
    /// `(1/n) log2 L_n` actually used.
    pub rate: f64,
    /// `-(1/n) log2 t_n`, the per-copy threshold rate.
    pub threshold_rate: f64,
    pub log_success: f64,
    pub log_failure: f64,
    /// `-(1/n) log2 (1 - P)`, absent when `P = 1`.
    pub failure_exponent: Option<f64>,
    /// `-(1/n) log2 P`, absent when `P = 0`.
    pub success_exponent: Option<f64>,
}

impl ExponentSample {
    /// The exponent that the regime is about.
    pub fn exponent(&self, regime: Regime) -> Option<f64> {
        match regime {
            Regime::Direct => self.failure_exponent,
            Regime::Converse => self.success_exponent,
        }
    }
}

/// `log2 L_n` for `L_n = ceil(2^{nR})`, clipped to `[1, d^n]`.
pub fn sweep_log_size(p: &SchmidtSpectrum, n: u64, rate: f64) -> f64 {
    let bits = n as f64 * rate;
    let max_bits = n as f64 * p.log2_dim();
    let log_l = if bits < EXACT_SIZE_BITS { bits.exp2().ceil().log2() } else { bits };
    log_l.clamp(0.0, max_bits)
}

fn exponent(log_value: f64, n: u64) -> Option<f64> {
    if log_value.is_finite() {
        Some((-log_value / n as f64).max(0.0))
    } else {
        None
    }
}

/// Exact sample at `n` copies for per-copy rate `rate`.
pub fn exponent_sample(p: &SchmidtSpectrum, n: u64, rate: f64) -> Result<ExponentSample> {
    let log_l = sweep_log_size(p, n, rate);
    let outcome = grouped_spectrum(p, n)?.success_probability(log_l)?;
    let nf = n as f64;
    Ok(ExponentSample {
        n,
        rate: outcome.log2_size / nf,
        threshold_rate: -outcome.log_threshold / nf,
        log_success: outcome.log_success,
        log_failure: outcome.log_failure,
        failure_exponent: exponent(outcome.log_failure, n),
        success_exponent: exponent(outcome.log_success, n),
    })
}

/// Exact samples for each `n` in `n_list`, in input order.
pub fn exponent_sweep(p: &SchmidtSpectrum, rate: f64, n_list: &[u64], regime: Regime) -> Result<Vec<ExponentSample>> {
    regime.check_rate(p, rate)?;
    ordered_map(n_list, |&n| exponent_sample(p, n, rate)).into_iter().collect()
}

/// `(d/n) log2 (n + 1)`, the polynomial correction in the type-counting bounds.
pub fn type_correction(n: u64, d: usize) -> f64 {
    d as f64 * ((n + 1) as f64).log2() / n as f64
}

/// Entropy and divergence of every type with denominator `n`.
fn type_coordinates(p: &SchmidtSpectrum, n: u64) -> Result<Vec<(f64, f64)>> {
    Ok(enumerate_types(n, p.dim())?
        .map(|t: TypeComposition| {
            let q = t.empirical();
            (entropy_of(&q), relative_entropy(&q, p).unwrap())
        })
        .collect())
}

/// Lower bound on the finite-`n` failure exponent from type counting.
///
/// `1 - P <= (n+1)^d max 2^{-n D(q||p)}` over types with `D + H < R_n`, so
/// `-(1/n) log2 (1 - P) >= min D - (d/n) log2 (n+1)`. `None` when no type
/// lies below the threshold (then `P = 1`).
pub fn direct_exponent_lower_bound(p: &SchmidtSpectrum, n: u64, threshold_rate: f64) -> Result<Option<f64>> {
    let slack = 1e-12 * threshold_rate.abs().max(1.0);
    let min_d = type_coordinates(p, n)?
        .into_iter()
        .filter(|&(h, d)| d + h <= threshold_rate + slack)
        .map(|(_, d)| d)
        .fold(f64::INFINITY, f64::min);
    Ok(min_d.is_finite().then(|| min_d - type_correction(n, p.dim())))
}

/// Lower bound on the finite-`n` success exponent from type counting.
///
/// `P <= (n+1)^d [max_{D+H <= R_n} 2^{n(H - R_n)} + max_{D+H >= R_n} 2^{-nD}]`.
pub fn converse_exponent_lower_bound(p: &SchmidtSpectrum, n: u64, threshold_rate: f64) -> Result<f64> {
    let nf = n as f64;
    let coords = type_coordinates(p, n)?;
    let below = coords
        .iter()
        .filter(|&&(h, d)| d + h <= threshold_rate)
        .map(|&(h, _)| nf * (h - threshold_rate))
        .fold(f64::NEG_INFINITY, f64::max);
    let above = coords
        .iter()
        .filter(|&&(h, d)| d + h >= threshold_rate)
        .map(|&(_, d)| -nf * d)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(-type_correction(n, p.dim()) - log_add(below, above) / nf)
}
