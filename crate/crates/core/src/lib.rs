//! Error-exponent analysis of pure-state entanglement concentration.
//!
//! A bipartite pure state is described by its Schmidt spectrum `p`. This
//! crate computes the optimal single-copy concentration protocol, the exact
//! success probability for `n` copies through the method of types, and the
//! asymptotic yield-versus-exponent curves `E(r)`, `E*(r)`, `E_F(r)` and
//! `E*_F(r)`. All logarithms are base 2 unless a function says otherwise.

pub mod distributions;
pub mod error;
pub mod fidelity;
pub mod finite;
pub mod harness;
pub mod iid;
pub mod logspace;
pub mod random;
pub mod rates;
mod roots;
pub mod types;
mod util;

pub use distributions::{
    psi, psi_derivatives, relative_entropy, shannon_entropy, solve_tilt_above, solve_tilt_below, tensor_product,
    tilted, tilted_divergence, tilted_entropy, SchmidtSpectrum, TiltSolution, TiltedFamilyPoint,
};
pub use error::{Error, Result};
pub use finite::{deterministic_yield, optimal_cut_index, optimal_probability, solve_plan, ConcentrationPlan};
pub use iid::{exact_success_prob, exponent_sweep, grouped_spectrum, ExponentSample, GroupedSpectrum, Regime};
pub use rates::{
    brute_force_converse, brute_force_direct, converse_yield, direct_yield, fidelity_converse_yield,
    fidelity_direct_yield, inverse_converse, inverse_direct, nonadditivity_report, r_prime, CurveRegime,
    RateCurvePoint,
};
pub use types::{enumerate_types, log_sequence_prob, log_type_class_prob, log_type_class_size, TypeComposition};
