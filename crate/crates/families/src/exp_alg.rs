use serde::{Deserialize, Serialize};
use xprlab_bignum::{BigComplex, BigReal};

use crate::{FamilyError, Result};

/// `coef · x^e0 · z_1^e1 ⋯ z_N^eN`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coef: BigComplex,
    pub exps: Vec<u32>,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }
}

fn unit_denominator() -> Vec<Monomial> {
    Vec::new()
}

/// `Q(x, e^{P_1(x)}, …, e^{P_N(x)})` with `Q = numerator / denominator`.
///
/// An empty denominator means `Q` is a polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyExpAlgParams {
    /// Complex coefficients of each `P_n`, increasing degree.
    pub polys: Vec<Vec<BigComplex>>,
    pub numerator: Vec<Monomial>,
    #[serde(default = "unit_denominator")]
    pub denominator: Vec<Monomial>,
}

impl PolyExpAlgParams {
    /// `e^{P(x)}`, i.e. `Q = z_1`.
    pub fn exp_of(poly: Vec<BigComplex>) -> Self {
        let bits = poly.first().map_or(xprlab_bignum::default_bits(), BigComplex::bits);
        PolyExpAlgParams {
            polys: vec![poly],
            numerator: vec![Monomial { coef: BigComplex::one(bits), exps: vec![0, 1] }],
            denominator: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.polys.len()
    }

    /// Largest degree among the `P_n`.
    pub fn d(&self) -> usize {
        self.polys.iter().map(|p| p.len().saturating_sub(1)).max().unwrap_or(0)
    }

    /// Total degree of `Q` (max over numerator and denominator).
    pub fn r(&self) -> u32 {
        self.numerator.iter().chain(&self.denominator).map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn param_count(&self) -> usize {
        2 * (self.polys.iter().map(Vec::len).sum::<usize>() + self.numerator.len() + self.denominator.len())
    }

    pub fn validate(&self) -> Result<()> {
        if self.polys.is_empty() {
            return Err(FamilyError::Invalid("H3 needs at least one exponent polynomial".into()));
        }
        if self.numerator.is_empty() {
            return Err(FamilyError::Invalid("empty numerator".into()));
        }
        let arity = self.n() + 1;
        if self.numerator.iter().chain(&self.denominator).any(|m| m.exps.len() != arity) {
            return Err(FamilyError::Invalid(format!("monomials must have {arity} exponents")));
        }
        Ok(())
    }

    fn eval_q(&self, ms: &[Monomial], x: &BigComplex, zs: &[BigComplex]) -> (BigComplex, BigReal) {
        let bits = x.bits();
        let mut acc = BigComplex::zero(bits);
        let mut scale = BigReal::zero(bits);
        for m in ms {
            let mut t = m.coef.clone();
            t = &t * &x.powi(m.exps[0]);
            for (z, &e) in zs.iter().zip(&m.exps[1..]) {
                t = &t * &z.powi(e);
            }
            scale += t.abs();
            acc = &acc + &t;
        }
        (acc, scale)
    }

    /// Complex value before the realness check.
    pub fn eval_complex(&self, x: &BigReal) -> Result<BigComplex> {
        self.validate()?;
        let bits = x.bits();
        let zs = self
            .polys
            .iter()
            .map(|p| {
                let mut acc = BigComplex::zero(bits);
                for c in p.iter().rev() {
                    acc = &acc.scale(x) + c;
                }
                acc.exp()
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let xc = BigComplex::from_real(x.clone());
        let (num, _) = self.eval_q(&self.numerator, &xc, &zs);
        if self.denominator.is_empty() {
            return Ok(num);
        }
        let (den, scale) = self.eval_q(&self.denominator, &xc, &zs);
        let floor = scale * BigReal::one(bits).ldexp(-(bits as i32) / 2);
        if den.abs() <= floor {
            return Err(FamilyError::DivisionByZero { x: x.to_short(20) });
        }
        Ok(&num / &den)
    }

    /// Real value; the imaginary part must be below `2^-64` relative to `max(1, |re|)`.
    pub fn eval_real(&self, x: &BigReal) -> Result<BigReal> {
        let v = self.eval_complex(x)?;
        let bound = v.re.abs().max(&BigReal::one(x.bits())).ldexp(-64);
        if v.im.abs() > bound {
            return Err(FamilyError::NonReal { im: v.im.to_short(12) });
        }
        Ok(v.re)
    }
}
