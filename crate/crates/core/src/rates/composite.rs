//! Yields of composite states `rho ⊗ sigma` and their (non-)additivity.

use serde::Serialize;

use super::direct_yield;
use crate::distributions::{tensor_product, SchmidtSpectrum};
use crate::error::Result;

/// Tolerance for the verdicts in [`NonAdditivityReport`].
pub const NONADDITIVITY_TOLERANCE: f64 = 1e-9;

/// Direct yields of `rho`, `sigma` and their products, with the relations between them.
///
/// Yields of a product state are per copy of the product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonAdditivityReport {
    pub r: f64,
    /// `E_r(rho)`.
    pub rho: f64,
    /// `E_r(sigma)`.
    pub sigma: f64,
    /// `E_r(rho ⊗ sigma)`.
    pub joint: f64,
    /// `E_{r/2}(rho)`.
    pub rho_half: f64,
    /// `E_{r/2}(sigma)`.
    pub sigma_half: f64,
    /// `E_r(rho ⊗ rho)`.
    pub rho_doubled: f64,
    /// `E_r(sigma ⊗ sigma)`.
    pub sigma_doubled: f64,
    /// `E_r(rho ⊗ sigma) <= E_{r/2}(rho) + E_{r/2}(sigma)`.
    pub subadditive: bool,
    /// `E_r(x ⊗ x) = 2 E_{r/2}(x)` for both states.
    pub doubling_identity: bool,
    /// `E_r(rho ⊗ sigma) <= (E_r(rho ⊗ rho) + E_r(sigma ⊗ sigma)) / 2`.
    pub average_bound: bool,
    /// `E_r(rho ⊗ sigma) >= E_r(rho) + E_r(sigma)`.
    pub superadditive: bool,
    /// The superadditive inequality holds with a margin above the tolerance.
    pub strictly_superadditive: bool,
}

/// Evaluates all seven yields and the four relations at tolerance [`NONADDITIVITY_TOLERANCE`].
pub fn nonadditivity_report(rho: &SchmidtSpectrum, sigma: &SchmidtSpectrum, r: f64) -> Result<NonAdditivityReport> {
    let e = |p: &SchmidtSpectrum, r: f64| direct_yield(p, r).map(|v| v.yield_bits);
    let tol = NONADDITIVITY_TOLERANCE;
    let rho_r = e(rho, r)?;
    let sigma_r = e(sigma, r)?;
    let joint = e(&tensor_product(rho, sigma), r)?;
    let rho_half = e(rho, r / 2.0)?;
    let sigma_half = e(sigma, r / 2.0)?;
    let rho_doubled = e(&tensor_product(rho, rho), r)?;
    let sigma_doubled = e(&tensor_product(sigma, sigma), r)?;
    Ok(NonAdditivityReport {
        r,
        rho: rho_r,
        sigma: sigma_r,
        joint,
        rho_half,
        sigma_half,
        rho_doubled,
        sigma_doubled,
        subadditive: joint <= rho_half + sigma_half + tol,
        doubling_identity: (rho_doubled - 2.0 * rho_half).abs() <= tol
            && (sigma_doubled - 2.0 * sigma_half).abs() <= tol,
        average_bound: joint <= 0.5 * (rho_doubled + sigma_doubled) + tol,
        superadditive: joint >= rho_r + sigma_r - tol,
        strictly_superadditive: joint > rho_r + sigma_r + tol,
    })
}
