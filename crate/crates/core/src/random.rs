//! Seeded random spectra for property checks and experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::distributions::SchmidtSpectrum;

/// Name of the generator recorded in experiment metadata.
pub const RNG_NAME: &str = "ChaCha8Rng";

/// Default seed of the check suite and the experiments.
pub const DEFAULT_SEED: u64 = 20_021_120;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A spectrum drawn uniformly from the simplex (Dirichlet with unit weights).
pub fn random_spectrum<R: Rng + ?Sized>(rng: &mut R, d: usize) -> SchmidtSpectrum {
    let weights: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(Exp1).max(f64::MIN_POSITIVE)).collect();
    SchmidtSpectrum::with_renormalize(&weights, true).expect("positive weights")
}

/// A spectrum with weights `1 + spread * u_i`, `u_i` uniform on `[-1, 1]`.
pub fn near_uniform_spectrum<R: Rng + ?Sized>(rng: &mut R, d: usize, spread: f64) -> SchmidtSpectrum {
    let spread = spread.clamp(0.0, 0.99);
    let weights: Vec<f64> = (0..d).map(|_| 1.0 + spread * rng.random_range(-1.0..=1.0)).collect();
    SchmidtSpectrum::with_renormalize(&weights, true).expect("positive weights")
}
