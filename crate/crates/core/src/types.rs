//! Types (empirical distributions) of length-`n` sequences over `d` symbols.
//!
//! Type classes are never materialised as sequences; only their log-sizes and
//! log-probabilities are computed, with multinomials through `ln Γ`.

use statrs::function::gamma::ln_gamma;
use std::f64::consts::LN_2;

use crate::error::{Error, Result};

/// Default cap on the number of types a single enumeration may produce.
pub const DEFAULT_TYPE_LIMIT: u64 = 100_000_000;

/// Counts `(N(a_1|x), ..., N(a_d|x))` of a type with denominator `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeComposition {
    counts: Vec<u64>,
    n: u64,
}

impl TypeComposition {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        let n = counts.iter().sum();
        if n == 0 {
            return Err(Error::InvalidConfig("type with denominator 0".into()));
        }
        Ok(TypeComposition { counts, n })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    /// The empirical distribution `counts_i / n`.
    pub fn empirical(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }
}

impl AsRef<[u64]> for TypeComposition {
    fn as_ref(&self) -> &[u64] {
        &self.counts
    }
}

/// `|P_n| = C(n + d - 1, d - 1)` as a float (exact below 2^53).
pub fn type_count(n: u64, d: usize) -> f64 {
    if d <= 1 {
        return 1.0;
    }
    let k = (d - 1) as u64;
    let mut count = 1.0f64;
    for i in 1..=k {
        count = count * (n + i) as f64 / i as f64;
    }
    count.round()
}

/// Streams all compositions of `n` into `d` parts, from `(n, 0, .., 0)`
/// down to `(0, .., 0, n)` in lexicographically decreasing order.
#[derive(Debug, Clone)]
pub struct TypeIter {
    current: Option<Vec<u64>>,
}

impl Iterator for TypeIter {
    type Item = TypeComposition;

    fn next(&mut self) -> Option<TypeComposition> {
        let counts = self.current.take()?;
        let n = counts.iter().sum();
        let d = counts.len();
        let mut next = counts.clone();
        let last = next[d - 1];
        next[d - 1] = 0;
        if let Some(i) = (0..d - 1).rev().find(|&i| next[i] > 0) {
            next[i] -= 1;
            next[i + 1] = last + 1;
            self.current = Some(next);
        }
        Some(TypeComposition { counts, n })
    }
}

/// All types with denominator `n` over `d` symbols, guarded by [`DEFAULT_TYPE_LIMIT`].
pub fn enumerate_types(n: u64, d: usize) -> Result<TypeIter> {
    enumerate_types_with_limit(n, d, DEFAULT_TYPE_LIMIT)
}

pub fn enumerate_types_with_limit(n: u64, d: usize, limit: u64) -> Result<TypeIter> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidConfig(format!("enumeration needs n >= 1 and d >= 1, got n={n}, d={d}")));
    }
    let count = type_count(n, d);
    if count > limit as f64 {
        return Err(Error::TooManyTypes { count, limit });
    }
    let mut first = vec![0; d];
    first[0] = n;
    Ok(TypeIter { current: Some(first) })
}

/// `log2 k!`.
pub fn log2_factorial(k: u64) -> f64 {
    if k < 2 {
        0.0
    } else {
        ln_gamma(k as f64 + 1.0) / LN_2
    }
}

/// `log2 |T_q^n| = log2 (n! / prod counts_i!)`.
pub fn log_type_class_size(t: &TypeComposition) -> f64 {
    let size = log2_factorial(t.n()) - t.counts().iter().map(|&c| log2_factorial(c)).sum::<f64>();
    size.max(0.0)
}

/// `log2 q^n(x)` for any sequence `x` of type `t`: `sum_i counts_i log2 q_i`.
pub fn log_sequence_prob<Q: AsRef<[f64]> + ?Sized>(t: &TypeComposition, q: &Q) -> Result<f64> {
    let q = q.as_ref();
    if q.len() != t.dim() {
        return Err(Error::DimensionMismatch { left: t.dim(), right: q.len() });
    }
    let mut total = 0.0;
    for (&c, &qi) in t.counts().iter().zip(q) {
        if c == 0 {
            continue;
        }
        if qi <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        total += c as f64 * qi.log2();
    }
    Ok(total)
}

/// `log2 q^n(T_t^n)`: class size plus per-sequence log-probability.
pub fn log_type_class_prob<Q: AsRef<[f64]> + ?Sized>(t: &TypeComposition, q: &Q) -> Result<f64> {
    Ok(log_type_class_size(t) + log_sequence_prob(t, q)?)
}
