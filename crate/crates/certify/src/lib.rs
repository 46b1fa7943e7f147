//! Checkable polynomial constraints on uniform samples.

use std::fmt::Display;

use serde::{Deserialize, Serialize};
use xprlab_bignum::{BigError, BigReal};

mod counting;
mod det;
mod exppoly;
mod vdw;

pub use counting::{binomial, constraint_grid_size, entropy_bound, EntropyBound};
pub use det::{det_certificate, det_of_matrix, hankel_certificate};
pub use exppoly::{discrete_derivative, exp_poly_certificate, exp_poly_certificate_real};
pub use vdw::{
    avoiding_coloring, find_monochromatic_ap, n_vdw_bound, vdw_composite_certificate, Coloring, Progression,
    SubCertifier,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertKind {
    Det,
    ExpPoly,
    VdwComposite,
    DerivativeBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertKind,
    pub residual: BigReal,
    pub tolerance: BigReal,
    pub pass: bool,
    pub metadata: serde_json::Value,
}

impl Certificate {
    pub fn new(kind: CertKind, residual: BigReal, tolerance: BigReal, metadata: serde_json::Value) -> Self {
        let pass = residual <= tolerance;
        Certificate { kind, residual, tolerance, pass, metadata }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CertifyError {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("order {s} exceeds grid length m = {m}")]
    Length { s: usize, m: usize },
    #[error("sample {index} vanishes")]
    ZeroSample { index: usize },
    #[error("budget: {0}")]
    Budget(String),
    #[error("sampling at x = {x}: {message}")]
    Sample { x: String, message: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("internal: {0}")]
    Internal(String),
    #[error(transparent)]
    Big(#[from] BigError),
}

pub type Result<T> = std::result::Result<T, CertifyError>;

/// `2^(-bits/2)`.
pub fn default_tolerance(bits: u32) -> BigReal {
    BigReal::one(bits).ldexp(-(bits as i32) / 2)
}

pub(crate) fn sample_with<E: Display>(
    g: &impl Fn(&BigReal) -> std::result::Result<BigReal, E>,
    x: &BigReal,
) -> Result<BigReal> {
    g(x).map_err(|e| CertifyError::Sample { x: x.to_short(20), message: e.to_string() })
}
