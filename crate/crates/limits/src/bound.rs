use rayon::prelude::*;
use serde_json::json;
use xprlab_bignum::BigReal;
use xprlab_certify::{CertKind, Certificate};
use xprlab_families::SineSumParams;

use crate::{LimitsError, Result};

/// `2^{M(M+1)}·(1+Ω)^{M·max(n, M−1)}` for an exponential sum with `M` terms.
pub fn derivative_bound(m: usize, n: u32, omega: &BigReal) -> BigReal {
    let bits = omega.bits();
    let e = m * (n as usize).max(m.saturating_sub(1));
    let growth = (omega.abs() + 1.0).powi(e as i32);
    growth.ldexp((m * (m + 1)) as i32).to_bits(bits)
}

/// Compares `max|f^(n)| / max|f|` over `points` grid points of `[0, 1]` with
/// the bound for `M = 2N` conjugate exponentials. `omega` defaults to the
/// largest frequency present.
pub fn derivative_bound_check(params: &SineSumParams, n: u32, omega: Option<&BigReal>, points: usize) -> Result<Certificate> {
    params.validate()?;
    if points < 2 {
        return Err(LimitsError::Invalid("need at least two grid points".into()));
    }
    let bits = params.waves.iter().map(|w| w.c.bits()).max().unwrap_or(128);
    let widest = params.max_abs_frequency();
    let omega = match omega {
        Some(o) if widest > *o => {
            return Err(LimitsError::Invalid(format!("frequency {} exceeds Ω = {}", widest.to_short(8), o.to_short(8))));
        }
        Some(o) => o.clone(),
        None => widest,
    };
    let step = BigReal::one(bits) / BigReal::from_i64(points as i64 - 1, bits);
    let (f_max, d_max) = (0..points)
        .into_par_iter()
        .map(|i| {
            let x = &step * (i as f64);
            Ok((params.eval(&x)?.abs(), params.derivative(&x, n)?.abs()))
        })
        .try_reduce(|| (BigReal::zero(bits), BigReal::zero(bits)), |a, b| Ok::<_, LimitsError>((a.0.max(&b.0), a.1.max(&b.1))))?;
    let ratio = if f_max.is_zero() { BigReal::zero(bits) } else { &d_max / &f_max };
    let m = 2 * params.n();
    let bound = derivative_bound(m, n, &omega);
    Ok(Certificate::new(
        CertKind::DerivativeBound,
        ratio,
        bound,
        json!({ "n": n, "M": m, "omega": omega.to_short(12), "points": points, "max_f": f_max.to_short(12), "max_derivative": d_max.to_short(12) }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use xprlab_families::Wave;

    const B: u32 = 128;

    #[test]
    fn bound_formula() {
        // M = 2, n = 1: 2^6 · 11^2
        let b = derivative_bound(2, 1, &BigReal::from_f64(10.0, B));
        assert_eq!(b.to_f64(), 64.0 * 121.0);
    }

    #[test]
    fn single_sine() {
        let p = SineSumParams::new(vec![Wave::from_f64(1.0, 10.0, 0.0, B)]).unwrap();
        let c = derivative_bound_check(&p, 1, None, 2001).unwrap();
        assert!(c.pass);
        assert!((c.residual.to_f64() - 10.0).abs() < 1e-4);
    }

    #[test]
    fn constant_ratio_vanishes() {
        let p = SineSumParams::new(vec![Wave::from_f64(2.0, 0.0, 0.5, B)]).unwrap();
        let c = derivative_bound_check(&p, 2, None, 100).unwrap();
        assert!(c.pass);
        assert!(c.residual.is_zero());
    }

    #[test]
    fn stated_band_must_cover_frequencies() {
        let p = SineSumParams::new(vec![Wave::from_f64(1.0, 30.0, 0.0, B)]).unwrap();
        assert!(derivative_bound_check(&p, 1, Some(&BigReal::from_f64(20.0, B)), 100).is_err());
    }
}
