//! Kronecker-orbit fitting: find a frequency `ω` with `ω·x_k ≡ θ_k (mod 2π)`
//! to a tolerance, and the single-sine fitting and shattering built on it.

use std::fmt;

use serde::Serialize;
use xprlab_bignum::{BigError, BigReal};
use xprlab_families::FamilyError;

mod independence;
mod lattice;
mod orbit;
pub mod phase;
mod shatter;

pub use independence::{rational_independence_check, Independence};
pub use lattice::{babai, enumerate_close, gso_norms, lll, Enumeration, Reduced};
pub use orbit::{
    circle_distance, fit_single_sine, fit_single_sine_with, grid_scan, residuals, solve_orbit, solve_orbit_with, DiophantineInstance, Method,
    OrbitOptions, OrbitSolution, SineFit,
};
pub use shatter::{shatter, shatter_with, sign_obstruction, three_term_identity_residual, Sign, ShatterInstance};

/// Why no frequency was returned.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum NotFound {
    /// `Σ λ_k x_k = 0` forces `Σ λ_k θ_k` to within `allowance` of `2πZ`, but it is `defect` away.
    Subtorus { lambda: Vec<i64>, defect: BigReal, allowance: BigReal },
    /// A point at zero sees the same phase for every `ω`.
    ZeroPoint { index: usize, distance: BigReal },
    /// Two progression triples with the same step demand opposite signs of `cos(ωv)`.
    SignObstruction { step: BigReal, first: [usize; 3], second: [usize; 3] },
    /// The frequency budget ran out.
    Budget { omega_max: BigReal, scanned_to: BigReal },
}

impl fmt::Display for NotFound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotFound::Subtorus { lambda, defect, .. } => {
                write!(f, "orbit confined to a subtorus: relation {lambda:?}, phase defect {}", defect.to_short(8))
            }
            NotFound::ZeroPoint { index, .. } => write!(f, "point {index} is zero and its target is out of reach"),
            NotFound::SignObstruction { first, second, .. } => {
                write!(f, "progression triples {first:?} and {second:?} need opposite signs of cos(ωv)")
            }
            NotFound::Budget { omega_max, .. } => write!(f, "no frequency up to {}", omega_max.to_short(8)),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum KroneckerError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("not found: {0}")]
    NotFound(NotFound),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error(transparent)]
    Big(#[from] BigError),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

pub type Result<T> = std::result::Result<T, KroneckerError>;
