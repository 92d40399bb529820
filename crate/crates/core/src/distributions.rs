//! Schmidt spectra and the entropy functionals built on them.
//!
//! All quantities are in bits. The tilted family `h(s)_i = p_i^s / sum_j p_j^s`
//! and the function `F(s) = D(h(s) || p)` drive every yield computation:
//! `F` decreases from `c = D(u || p)` at `s = 0` to zero at `s = 1`, then
//! increases towards `-log2 p_1` as `s` grows.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logspace::log_sum;
use crate::roots::bisect;
use std::f64::consts::LN_2;

/// Accepted deviation of the input sum from 1 when renormalization is off.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Relative gap under which two coefficients count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Target accuracy `|F(s) - r|` for the tilt solvers.
pub const TILT_TOLERANCE: f64 = 1e-12;

/// Largest tilt the upper solver will try before giving up.
pub const TILT_CAP: f64 = 1e6;

/// Squared Schmidt coefficients: strictly positive, sorted descending, summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SchmidtSpectrum {
    probs: Vec<f64>,
}

impl SchmidtSpectrum {
    /// Validates `values` as a probability vector. Zeros are stripped.
    pub fn new(values: &[f64]) -> Result<Self> {
        Self::with_renormalize(values, false)
    }

    /// Like [`SchmidtSpectrum::new`], but rescales any positive total to one
    /// when `renormalize` is set.
    pub fn with_renormalize(values: &[f64], renormalize: bool) -> Result<Self> {
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteEntry { index });
            }
            if value < 0.0 {
                return Err(Error::NegativeEntry { index, value });
            }
        }
        let mut probs: Vec<f64> = values.iter().copied().filter(|&v| v > 0.0).collect();
        if probs.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        let sum: f64 = probs.iter().sum();
        if !renormalize && (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized { sum });
        }
        // Sums within rounding of one are kept as given, so that rebuilding a
        // spectrum from its own entries returns it unchanged.
        if (sum - 1.0).abs() > probs.len() as f64 * f64::EPSILON {
            probs.iter_mut().for_each(|v| *v /= sum);
        }
        probs.sort_by(|a, b| b.total_cmp(a));
        Ok(SchmidtSpectrum { probs })
    }

    /// The maximally entangled spectrum of dimension `d`.
    pub fn uniform(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::EmptySpectrum);
        }
        Ok(SchmidtSpectrum { probs: vec![1.0 / d as f64; d] })
    }

    /// Builds a spectrum from already positive, normalized entries (any order).
    pub(crate) fn from_positive(mut probs: Vec<f64>) -> Self {
        let sum: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|v| *v /= sum);
        probs.sort_by(|a, b| b.total_cmp(a));
        SchmidtSpectrum { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    /// Largest coefficient `p_1`.
    pub fn largest(&self) -> f64 {
        self.probs[0]
    }

    /// Smallest coefficient `p_d`.
    pub fn smallest(&self) -> f64 {
        self.probs[self.probs.len() - 1]
    }

    /// Number of coefficients tied with the largest one.
    pub fn largest_multiplicity(&self) -> usize {
        let p1 = self.largest();
        self.probs.iter().take_while(|&&v| v >= p1 * (1.0 - TIE_TOLERANCE)).count()
    }

    /// True when all coefficients are equal (including the product state).
    pub fn is_uniform(&self) -> bool {
        self.smallest() >= self.largest() * (1.0 - TIE_TOLERANCE)
    }

    pub fn log2_probs(&self) -> Vec<f64> {
        self.probs.iter().map(|v| v.log2()).collect()
    }

    /// `log2 d`, the entropy of the maximally entangled state of this dimension.
    pub fn log2_dim(&self) -> f64 {
        (self.dim() as f64).log2()
    }

    /// `-log2 p_1`, the deterministic yield per copy.
    pub fn min_entropy(&self) -> f64 {
        -self.largest().log2()
    }

    /// `c = D(u || p)`, where the strong-converse yield reaches `log2 d`.
    pub fn uniform_divergence(&self) -> f64 {
        let d = self.dim() as f64;
        let mean_log: f64 = self.probs.iter().map(|v| v.log2()).sum::<f64>() / d;
        (-d.log2() - mean_log).max(0.0)
    }

    /// `lim_{s -> inf} F(s) = -log2(m p_1)` with `m` the multiplicity of `p_1`.
    ///
    /// Exponents at or above this value saturate the direct yield.
    pub fn direct_saturation(&self) -> f64 {
        let m = self.largest_multiplicity() as f64;
        (-(m * self.largest()).log2()).max(0.0)
    }
}

impl AsRef<[f64]> for SchmidtSpectrum {
    fn as_ref(&self) -> &[f64] {
        &self.probs
    }
}

/// `H(p) = -sum p_i log2 p_i`.
pub fn shannon_entropy(p: &SchmidtSpectrum) -> f64 {
    entropy_of(p.probs())
}

pub(crate) fn entropy_of(q: &[f64]) -> f64 {
    -q.iter().filter(|&&v| v > 0.0).map(|&v| v * v.log2()).sum::<f64>()
}

/// `D(q || p)` in bits with `0 log 0 = 0`; `+inf` when `q` charges a zero of `p`.
pub fn relative_entropy<Q: AsRef<[f64]> + ?Sized, P: AsRef<[f64]> + ?Sized>(q: &Q, p: &P) -> Result<f64> {
    let (q, p) = (q.as_ref(), p.as_ref());
    if q.len() != p.len() {
        return Err(Error::DimensionMismatch { left: q.len(), right: p.len() });
    }
    let mut total = 0.0;
    for (&qi, &pi) in q.iter().zip(p) {
        if qi <= 0.0 {
            continue;
        }
        if pi <= 0.0 {
            return Ok(f64::INFINITY);
        }
        total += qi * (qi / pi).log2();
    }
    Ok(total)
}

/// The tilted family at one `s`, written relative to `m = log2 p_1`.
///
/// With `delta_i = log2 p_i - m <= 0` and `N = log2 sum_j 2^{s delta_j}`,
/// `h_i = 2^{s delta_i - N}`, `psi = s m + N`, `F = (s - 1) <delta>_h - N - m`
/// and `H(h) = N - s <delta>_h`. None of these subtracts two numbers of
/// size `s`, so they stay accurate for tilts in the thousands.
struct Tilt {
    m: f64,
    norm: f64,
    weights: Vec<f64>,
    deltas: Vec<f64>,
    mean_delta: f64,
}

impl Tilt {
    fn at(p: &SchmidtSpectrum, s: f64) -> Self {
        let m = p.largest().log2();
        let deltas: Vec<f64> = p.probs().iter().map(|v| v.log2() - m).collect();
        let norm = log_sum(deltas.iter().map(|d| s * d));
        let weights: Vec<f64> = deltas.iter().map(|d| (s * d - norm).exp2()).collect();
        let mean_delta = weights.iter().zip(&deltas).map(|(w, d)| w * d).sum();
        Tilt { m, norm, weights, deltas, mean_delta }
    }
}

/// `psi(s) = log2 sum_i p_i^s`, evaluated by log-sum-exp.
pub fn psi(p: &SchmidtSpectrum, s: f64) -> f64 {
    let t = Tilt::at(p, s);
    s * t.m + t.norm
}

/// First and second derivative of [`psi`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiDerivatives {
    pub first: f64,
    pub second: f64,
}

/// `psi'(s) = sum h_i(s) log2 p_i` and `psi''(s) = ln 2 * Var_{h(s)}(log2 p)`.
pub fn psi_derivatives(p: &SchmidtSpectrum, s: f64) -> PsiDerivatives {
    let t = Tilt::at(p, s);
    let variance: f64 = t.weights.iter().zip(&t.deltas).map(|(w, d)| w * (d - t.mean_delta).powi(2)).sum();
    PsiDerivatives { first: t.m + t.mean_delta, second: LN_2 * variance }
}

/// The tilted distribution `h(s)_i = p_i^s / sum_j p_j^s`.
pub fn tilted(p: &SchmidtSpectrum, s: f64) -> SchmidtSpectrum {
    let h = Tilt::at(p, s).weights;
    // Large tilts can underflow the tail; keep only representable support.
    SchmidtSpectrum::from_positive(h.into_iter().filter(|&v| v > 0.0).collect())
}

/// `F(s) = -psi(s) - (1 - s) psi'(s)`, which equals `D(h(s) || p)`.
pub fn tilted_divergence(p: &SchmidtSpectrum, s: f64) -> f64 {
    let t = Tilt::at(p, s);
    ((s - 1.0) * t.mean_delta - t.norm - t.m).max(0.0)
}

/// `H(h(s)) = psi(s) - s psi'(s)`.
pub fn tilted_entropy(p: &SchmidtSpectrum, s: f64) -> f64 {
    let t = Tilt::at(p, s);
    (t.norm - s * t.mean_delta).max(0.0)
}

/// Every quantity of the tilted family at one tilt.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltedFamilyPoint {
    pub s: f64,
    pub h: SchmidtSpectrum,
    pub psi: f64,
    pub psi_prime: f64,
    pub psi_double_prime: f64,
    pub f_value: f64,
}

impl TiltedFamilyPoint {
    pub fn at(p: &SchmidtSpectrum, s: f64) -> Self {
        let derivs = psi_derivatives(p, s);
        TiltedFamilyPoint {
            s,
            h: tilted(p, s),
            psi: psi(p, s),
            psi_prime: derivs.first,
            psi_double_prime: derivs.second,
            f_value: tilted_divergence(p, s),
        }
    }
}

/// Outcome of solving `F(s) = r` on one branch of the tilted family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TiltSolution {
    /// The unique tilt on the requested branch.
    Interior(f64),
    /// `r` lies at or beyond the branch's limiting value of `F`.
    Saturated,
}

impl TiltSolution {
    pub fn tilt(self) -> Option<f64> {
        match self {
            TiltSolution::Interior(s) => Some(s),
            TiltSolution::Saturated => None,
        }
    }
}

/// Solves `F(s) = r` for `s > 1`.
///
/// Saturates when `r` reaches `lim F = -log2(m p_1)`; for a spectrum with a
/// unique largest coefficient this is `-log2 p_1`.
pub fn solve_tilt_above(p: &SchmidtSpectrum, r: f64) -> Result<TiltSolution> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveExponent(r));
    }
    if p.is_uniform() || r >= p.direct_saturation() {
        return Ok(TiltSolution::Saturated);
    }
    let mut hi = 2.0;
    while tilted_divergence(p, hi) <= r {
        hi *= 2.0;
        if hi > TILT_CAP {
            return Err(Error::BracketExceeded { target: r, cap: TILT_CAP });
        }
    }
    let s = bisect(|s| tilted_divergence(p, s), 1.0, hi, r, true, TILT_TOLERANCE);
    Ok(TiltSolution::Interior(s))
}

/// Solves `F(s) = r` for `0 < s < 1`; saturates once `r >= c = D(u || p)`.
pub fn solve_tilt_below(p: &SchmidtSpectrum, r: f64) -> Result<TiltSolution> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveExponent(r));
    }
    if p.is_uniform() || r >= p.uniform_divergence() {
        return Ok(TiltSolution::Saturated);
    }
    let s = bisect(|s| tilted_divergence(p, s), 0.0, 1.0, r, false, TILT_TOLERANCE);
    Ok(TiltSolution::Interior(s))
}

/// Spectrum of the composite state: all pairwise products, re-sorted.
pub fn tensor_product(p: &SchmidtSpectrum, q: &SchmidtSpectrum) -> SchmidtSpectrum {
    let mut probs: Vec<f64> = p.probs().iter().flat_map(|a| q.probs().iter().map(move |b| a * b)).collect();
    probs.sort_by(|a, b| b.total_cmp(a));
    SchmidtSpectrum { probs }
}
