use serde::{Serialize, Serializer};
use xprlab_bignum::BigReal;

use crate::{CertifyError, Result};

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact: the running product is always a binomial coefficient
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// `m = (q+1)·C(N+r+1, N+1) + (max(1,d)+1)·(N+1)`.
pub fn constraint_grid_size(n: u64, q: u64, r: u64, d: u64) -> u128 {
    let first = (q as u128 + 1).saturating_mul(binomial(n + r + 1, n + 1));
    let second = (d.max(1) as u128 + 1) * (n as u128 + 1);
    first.saturating_add(second)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyBound {
    Finite(u64),
    Unbounded,
}

impl Serialize for EntropyBound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            EntropyBound::Finite(n) => s.serialize_u64(*n),
            EntropyBound::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

/// Largest `N` with `N·log2(M/ε) ≤ p·B`.
pub fn entropy_bound(p: u64, b: u64, m: &BigReal, eps: &BigReal) -> Result<EntropyBound> {
    if p < 1 || b < 1 {
        return Err(CertifyError::Domain("p and B must be at least 1".into()));
    }
    if eps.signum() <= 0 || m <= eps {
        return Err(CertifyError::Domain("need M > ε > 0".into()));
    }
    let bits = m.bits().max(eps.bits());
    let info = (m / eps).log2()?;
    if info.signum() <= 0 {
        return Ok(EntropyBound::Unbounded);
    }
    let budget = BigReal::from_f64((p as f64) * (b as f64), bits);
    let n = (budget / info).floor();
    if n >= u64::MAX as f64 {
        return Ok(EntropyBound::Unbounded);
    }
    Ok(EntropyBound::Finite(n.to_i64().map_or(u64::MAX, |v| v as u64)))
}
