//! Limit points of sine sums and σ-sines, built explicitly.

use std::fmt::Display;

use rayon::prelude::*;
use xprlab_bignum::{BigError, BigReal};
use xprlab_families::FamilyError;

mod bound;
mod recovery;
mod resonance;
mod sigma_path;

pub use bound::{derivative_bound, derivative_bound_check};
pub use recovery::{recover_coefficients, synthesize, Recovered, RecoveredRoot, RecoveryInstance, Root};
pub use resonance::{merge_waves, polynomial_combo, resonance_combo, ResonantTarget, ResonantTerm};
pub use sigma_path::{sigma_limit_path, LimitKind};

#[derive(Debug, thiserror::Error)]
pub enum LimitsError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("cancellation factor 2^{log2:.1} exceeds the precision budget")]
    Overflow { log2: f64 },
    #[error("shifted-monomial system is ill-conditioned (condition ≈ 2^{log2:.1})")]
    IllConditioned { log2: f64 },
    #[error("rank: {0}")]
    Rank(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("evaluation: {0}")]
    Eval(String),
    #[error(transparent)]
    Big(#[from] BigError),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

pub type Result<T> = std::result::Result<T, LimitsError>;

pub const DEFAULT_SUP_POINTS: usize = 10_000;

/// `max |f(x_i) − g(x_i)|` over `n` equally spaced points of `[0, 1]`.
///
/// A lower bound on the uniform distance.
pub fn sup_distance<E, F, G>(f: F, g: G, n: usize, bits: u32) -> Result<BigReal>
where
    E: Display,
    F: Fn(&BigReal) -> std::result::Result<BigReal, E> + Sync,
    G: Fn(&BigReal) -> std::result::Result<BigReal, E> + Sync,
{
    if n < 2 {
        return Err(LimitsError::Invalid("need at least two grid points".into()));
    }
    let step = BigReal::one(bits) / BigReal::from_i64(n as i64 - 1, bits);
    (0..n)
        .into_par_iter()
        .map(|i| {
            let x = &step * (i as f64);
            let a = f(&x).map_err(|e| LimitsError::Eval(e.to_string()))?;
            let b = g(&x).map_err(|e| LimitsError::Eval(e.to_string()))?;
            Ok((a - b).abs())
        })
        .try_reduce(|| BigReal::zero(bits), |a, b| Ok(a.max(&b)))
}
