use serde::{Deserialize, Serialize};
use xprlab_bignum::BigReal;
use xprlab_families::{Sigma, SigmaSineParams};

use crate::{LimitsError, Result};

/// Nontrivial limits of `c·sin(ω·σ(bx) + h)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LimitKind {
    /// `a·σ(bx) + c`
    AffineSigma { a: BigReal, b: BigReal, c: BigReal },
    /// `a0 + ar·x^r`
    Monomial { a0: BigReal, ar: BigReal, r: u32 },
    /// `c·sin(a0 + ar·x^r)`
    SineOfMonomial { c: BigReal, a0: BigReal, ar: BigReal, r: u32 },
}

impl LimitKind {
    pub fn eval(&self, sigma: &Sigma, x: &BigReal) -> Result<BigReal> {
        Ok(match self {
            LimitKind::AffineSigma { a, b, c } => a * sigma.eval(&(b * x))? + c,
            LimitKind::Monomial { a0, ar, r } => ar * x.powi(*r as i32) + a0,
            LimitKind::SineOfMonomial { c, a0, ar, r } => c * (ar * x.powi(*r as i32) + a0).sin()?,
        })
    }
}

fn leading(sigma: &Sigma, r: u32, bits: u32) -> Result<BigReal> {
    let (order, kappa) = sigma
        .leading_term(bits)
        .ok_or_else(|| LimitsError::Domain(format!("{} is constant", sigma.name())))?;
    if order != r {
        return Err(LimitsError::Domain(format!("{} starts at order {order}, target has r = {r}", sigma.name())));
    }
    Ok(kappa)
}

/// Member at path parameter `t ∈ (0, 1]`; the uniform distance to the limit is `O(t)`.
pub fn sigma_limit_path(sigma: &Sigma, kind: &LimitKind, t: &BigReal) -> Result<SigmaSineParams> {
    if t.signum() <= 0 || *t > 1.0 {
        return Err(LimitsError::Invalid(format!("t = {} outside (0, 1]", t.to_short(8))));
    }
    let bits = t.bits();
    let s0 = sigma.eval(&BigReal::zero(bits))?;
    let member = |c: BigReal, omega: BigReal, b: BigReal, h: BigReal| SigmaSineParams { sigma: sigma.clone(), c, omega, b, h };
    match kind {
        LimitKind::AffineSigma { a, b, c } => {
            if a.is_zero() {
                return Err(LimitsError::Domain("a = 0 leaves a constant".into()));
            }
            if b.abs() > 1.0 {
                return Err(LimitsError::Domain("b outside [-1, 1]".into()));
            }
            sigma.leading_term(bits).ok_or_else(|| LimitsError::Domain(format!("{} is constant", sigma.name())))?;
            Ok(member(a / t, t.clone(), b.clone(), c * t / a))
        }
        LimitKind::Monomial { a0, ar, r } => {
            let kappa = leading(sigma, *r, bits)?;
            let big = ar / (&kappa * t.powi(*r as i32));
            let phi = a0.atan2(&big);
            Ok(member(a0.hypot(&big), BigReal::one(bits), t.clone(), phi - s0))
        }
        LimitKind::SineOfMonomial { c, a0, ar, r } => {
            let kappa = leading(sigma, *r, bits)?;
            let omega = ar / (&kappa * t.powi(*r as i32));
            let h = a0 - &omega * &s0;
            Ok(member(c.clone(), omega, t.clone(), h))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sup_distance;

    const B: u32 = 128;

    fn b(x: f64) -> BigReal {
        BigReal::from_f64(x, B)
    }

    fn distance(sigma: &Sigma, kind: &LimitKind, t: f64) -> f64 {
        let p = sigma_limit_path(sigma, kind, &b(t)).unwrap();
        sup_distance(|x: &BigReal| p.eval(x).map_err(|e| e.to_string()), |x: &BigReal| kind.eval(sigma, x).map_err(|e| e.to_string()), 1000, B)
            .unwrap()
            .to_f64()
    }

    #[test]
    fn affine_sigmoid() {
        let kind = LimitKind::AffineSigma { a: b(2.0), b: b(0.5), c: b(1.0) };
        assert!(distance(&Sigma::Sigmoid, &kind, 1e-2) < 1e-1);
        assert!(distance(&Sigma::Sigmoid, &kind, 1e-3) < 1e-2);
    }

    #[test]
    fn monomial_through_sigmoid() {
        let kind = LimitKind::Monomial { a0: b(0.0), ar: b(1.0), r: 1 };
        let d2 = distance(&Sigma::Sigmoid, &kind, 1e-2);
        let d3 = distance(&Sigma::Sigmoid, &kind, 1e-3);
        assert!(d3 < d2 && d3 < 1e-2, "{d2} {d3}");
    }

    #[test]
    fn sine_of_square_through_gaussian() {
        let kind = LimitKind::SineOfMonomial { c: b(1.5), a0: b(0.3), ar: b(2.0), r: 2 };
        assert!(distance(&Sigma::Gaussian, &kind, 1e-3) < 1e-2);
    }

    #[test]
    fn order_mismatch() {
        let kind = LimitKind::Monomial { a0: b(0.0), ar: b(1.0), r: 2 };
        assert!(matches!(sigma_limit_path(&Sigma::Tanh, &kind, &b(0.1)), Err(LimitsError::Domain(_))));
        let constant = Sigma::Polynomial(vec![b(3.0)]);
        assert!(matches!(sigma_limit_path(&constant, &kind, &b(0.1)), Err(LimitsError::Domain(_))));
    }

    #[test]
    fn t_one_is_a_member() {
        let kind = LimitKind::AffineSigma { a: b(2.0), b: b(0.5), c: b(1.0) };
        let p = sigma_limit_path(&Sigma::Tanh, &kind, &b(1.0)).unwrap();
        assert!(p.eval(&b(0.5)).is_ok());
        assert!(sigma_limit_path(&Sigma::Tanh, &kind, &b(0.0)).is_err());
    }
}
