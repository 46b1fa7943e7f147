use serde::{Deserialize, Serialize};
use xprlab_bignum::{BigReal, Real, Result};

/// Inner activation of the `c·sin(ω·σ(bx)+h)` family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sigma {
    Sigmoid,
    Tanh,
    Gaussian,
    Sin,
    /// Coefficients in increasing degree.
    Polynomial(Vec<BigReal>),
}

impl Sigma {
    pub fn name(&self) -> &'static str {
        match self {
            Sigma::Sigmoid => "sigmoid",
            Sigma::Tanh => "tanh",
            Sigma::Gaussian => "gaussian",
            Sigma::Sin => "sin",
            Sigma::Polynomial(_) => "polynomial",
        }
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self, Sigma::Polynomial(_))
    }

    pub fn eval<R: Real>(&self, z: &R) -> Result<R> {
        let one = z.lift(1.0);
        Ok(match self {
            Sigma::Sigmoid => one.clone() / (one + (-z.clone()).exp_r()?),
            Sigma::Tanh => z.tanh_r(),
            Sigma::Gaussian => (-(z.clone() * z.clone())).exp_r()?,
            Sigma::Sin => z.sin_r()?,
            Sigma::Polynomial(c) => horner(c, z),
        })
    }

    /// First derivative.
    pub fn d1<R: Real>(&self, z: &R) -> Result<R> {
        let one = z.lift(1.0);
        Ok(match self {
            Sigma::Sigmoid => {
                let s = self.eval(z)?;
                s.clone() * (one - s)
            }
            Sigma::Tanh => {
                let t = z.tanh_r();
                one - t.clone() * t
            }
            Sigma::Gaussian => z.lift(-2.0) * z.clone() * (-(z.clone() * z.clone())).exp_r()?,
            Sigma::Sin => z.cos_r()?,
            Sigma::Polynomial(c) => horner(&derivative(c), z),
        })
    }

    /// Second derivative.
    pub fn d2<R: Real>(&self, z: &R) -> Result<R> {
        let one = z.lift(1.0);
        Ok(match self {
            Sigma::Sigmoid => {
                let s = self.eval(z)?;
                s.clone() * (one.clone() - s.clone()) * (one - z.lift(2.0) * s)
            }
            Sigma::Tanh => {
                let t = z.tanh_r();
                z.lift(-2.0) * t.clone() * (one - t.clone() * t)
            }
            Sigma::Gaussian => {
                let z2 = z.clone() * z.clone();
                (z.lift(4.0) * z2.clone() - z.lift(2.0)) * (-z2).exp_r()?
            }
            Sigma::Sin => -z.sin_r()?,
            Sigma::Polynomial(c) => horner(&derivative(&derivative(c)), z),
        })
    }

    /// Order `r` of the first non-vanishing derivative at 0 (r > 0) and the
    /// Taylor coefficient `σ^(r)(0)/r!`; `None` for a constant σ.
    pub fn leading_term(&self, bits: u32) -> Option<(u32, BigReal)> {
        match self {
            Sigma::Sigmoid => Some((1, BigReal::ratio(1, 4, bits))),
            Sigma::Tanh | Sigma::Sin => Some((1, BigReal::one(bits))),
            Sigma::Gaussian => Some((2, BigReal::from_i64(-1, bits))),
            Sigma::Polynomial(c) => c
                .iter()
                .enumerate()
                .skip(1)
                .find(|(_, v)| !v.is_zero())
                .map(|(k, v)| (k as u32, v.to_bits(bits))),
        }
    }
}

pub(crate) fn horner<R: Real>(c: &[BigReal], z: &R) -> R {
    let mut acc = z.lift(0.0);
    for v in c.iter().rev() {
        acc = acc * z.clone() + R::from_big(v, z);
    }
    acc
}

fn derivative(c: &[BigReal]) -> Vec<BigReal> {
    c.iter().enumerate().skip(1).map(|(k, v)| v * (k as f64)).collect()
}
