//! Arbitrary-precision scalars for the rest of the workspace.
//!
//! `BigReal` carries its precision in bits and never loses it silently: every
//! binary operation returns a value at the larger of the two operand
//! precisions. Trigonometric functions go through an explicit reduction
//! modulo 2π evaluated with guard bits, so frequencies of any magnitude can be
//! pushed through `sin` without losing the phase.

mod complex;
pub mod linalg;
mod real;
mod scalar;

use std::sync::atomic::{AtomicU32, Ordering};

pub use complex::BigComplex;
pub use real::{reduce_mod_2pi, BigReal};
pub use scalar::Real;

/// Working precision used when none is given explicitly.
pub const DEFAULT_BITS: u32 = 256;

/// Largest guard precision `reduce_mod_2pi` may request before giving up.
pub const DEFAULT_PRECISION_CEILING: u32 = 1 << 16;

static WORKING_BITS: AtomicU32 = AtomicU32::new(DEFAULT_BITS);
static CEILING: AtomicU32 = AtomicU32::new(DEFAULT_PRECISION_CEILING);

/// Process-wide default precision in bits.
pub fn default_bits() -> u32 {
    WORKING_BITS.load(Ordering::Relaxed)
}

pub fn set_default_bits(bits: u32) {
    WORKING_BITS.store(bits.max(rug::float::prec_min()).min(rug::float::prec_max()), Ordering::Relaxed);
}

pub fn precision_ceiling() -> u32 {
    CEILING.load(Ordering::Relaxed)
}

pub fn set_precision_ceiling(bits: u32) {
    CEILING.store(bits, Ordering::Relaxed);
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BigError {
    #[error("non-finite value")]
    NonFinite,
    #[error("argument reduction needs {needed} bits, ceiling is {ceiling}")]
    PrecisionExhausted { needed: u32, ceiling: u32 },
    #[error("cannot parse `{0}` as a BigReal")]
    Parse(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular matrix")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, BigError>;
