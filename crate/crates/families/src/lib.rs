//! The parametric families under study and their evaluation.
//!
//! | tag      | member                                   |
//! |----------|------------------------------------------|
//! | `H1`     | `c·sin(ωx)`                              |
//! | `H2`     | `Σ c_n·sin(ω_n x + h_n)`                 |
//! | `H3`     | `Q(x, e^{P_1(x)}, …, e^{P_N(x)})`, rational `Q` |
//! | `Hsigma` | `c·sin(ω·σ(bx) + h)`                     |
//! | `H5`     | `c·sin(g(x)) + h`, `g` a sine sum        |

mod exp_alg;
mod grid;
pub mod random;
mod sigma;

use serde::{Deserialize, Serialize};
use xprlab_bignum::{BigError, BigReal};

pub use exp_alg::{Monomial, PolyExpAlgParams};
pub use grid::{sample, sample_complex, GridError, SampleGrid};
pub use sigma::Sigma;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FamilyError {
    #[error("denominator of Q vanishes at x = {x}")]
    DivisionByZero { x: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("result is not real: imaginary part {im}")]
    NonReal { im: String },
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error(transparent)]
    Big(#[from] BigError),
}

pub type Result<T> = std::result::Result<T, FamilyError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wave {
    pub c: BigReal,
    pub omega: BigReal,
    pub h: BigReal,
}

impl Wave {
    pub fn new(c: BigReal, omega: BigReal, h: BigReal) -> Self {
        Wave { c, omega, h }
    }

    pub fn from_f64(c: f64, omega: f64, h: f64, bits: u32) -> Self {
        Wave::new(BigReal::from_f64(c, bits), BigReal::from_f64(omega, bits), BigReal::from_f64(h, bits))
    }

    pub fn eval(&self, x: &BigReal) -> Result<BigReal> {
        Ok(&self.c * (&self.omega * x + &self.h).sin()?)
    }
}

/// Sum of sine waves (`H2_N`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SineSumParams {
    pub waves: Vec<Wave>,
}

impl SineSumParams {
    pub fn new(waves: Vec<Wave>) -> Result<Self> {
        let p = SineSumParams { waves };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.waves.is_empty() {
            return Err(FamilyError::Invalid("a sine sum needs at least one wave".into()));
        }
        if self.waves.iter().any(|w| !(w.c.is_finite() && w.omega.is_finite() && w.h.is_finite())) {
            return Err(FamilyError::Invalid("non-finite wave parameter".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.waves.len()
    }

    pub fn eval(&self, x: &BigReal) -> Result<BigReal> {
        let mut acc = BigReal::zero(x.bits());
        for w in &self.waves {
            acc += w.eval(x)?;
        }
        Ok(acc)
    }

    /// n-th derivative in x.
    pub fn derivative(&self, x: &BigReal, n: u32) -> Result<BigReal> {
        let bits = x.bits();
        let shift = BigReal::pi(bits).ldexp(-1) * f64::from(n);
        let mut acc = BigReal::zero(bits);
        for w in &self.waves {
            let arg = &w.omega * x + &w.h + &shift;
            acc += &w.c * w.omega.powi(n as i32) * arg.sin()?;
        }
        Ok(acc)
    }

    pub fn max_abs_frequency(&self) -> BigReal {
        let bits = self.waves.first().map_or(xprlab_bignum::default_bits(), |w| w.omega.bits());
        self.waves.iter().fold(BigReal::zero(bits), |m, w| m.max(&w.omega.abs()))
    }

    pub fn negated(&self) -> Self {
        SineSumParams {
            waves: self.waves.iter().map(|w| Wave::new(-&w.c, w.omega.clone(), w.h.clone())).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleSineParams {
    pub c: BigReal,
    pub omega: BigReal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaSineParams {
    pub sigma: Sigma,
    pub c: BigReal,
    pub omega: BigReal,
    pub b: BigReal,
    pub h: BigReal,
}

impl SigmaSineParams {
    pub fn eval(&self, x: &BigReal) -> Result<BigReal> {
        if self.b.abs() > 1.0 {
            return Err(FamilyError::Domain(format!("b = {} outside [-1, 1]", self.b.to_short(12))));
        }
        let s = self.sigma.eval(&(&self.b * x))?;
        Ok(&self.c * (&self.omega * s + &self.h).sin()?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SineOfSineParams {
    pub c: BigReal,
    pub h: BigReal,
    pub inner: SineSumParams,
}

impl SineOfSineParams {
    pub fn eval(&self, x: &BigReal) -> Result<BigReal> {
        Ok(&self.c * self.inner.eval(x)?.sin()? + &self.h)
    }
}

/// Tagged parameter record, serialized as `{"family": tag, "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params")]
pub enum FamilyParams {
    H1(SingleSineParams),
    H2(SineSumParams),
    H3(PolyExpAlgParams),
    #[serde(rename = "Hsigma")]
    HSigma(SigmaSineParams),
    H5(SineOfSineParams),
}

impl FamilyParams {
    pub fn tag(&self) -> &'static str {
        match self {
            FamilyParams::H1(_) => "H1",
            FamilyParams::H2(_) => "H2",
            FamilyParams::H3(_) => "H3",
            FamilyParams::HSigma(_) => "Hsigma",
            FamilyParams::H5(_) => "H5",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FamilyParams::H2(p) => p.validate(),
            FamilyParams::H5(p) => p.inner.validate(),
            FamilyParams::H3(p) => p.validate(),
            FamilyParams::HSigma(p) if p.b.abs() > 1.0 => Err(FamilyError::Domain("b outside [-1, 1]".into())),
            _ => Ok(()),
        }
    }

    /// Number of real parameters.
    pub fn param_count(&self) -> usize {
        match self {
            FamilyParams::H1(_) => 2,
            FamilyParams::H2(p) => 3 * p.n(),
            FamilyParams::H3(p) => p.param_count(),
            FamilyParams::HSigma(_) => 4,
            FamilyParams::H5(p) => 2 + 3 * p.inner.n(),
        }
    }

    /// Value of the member at any finite `x`.
    pub fn evaluate(&self, x: &BigReal) -> Result<BigReal> {
        if !x.is_finite() {
            return Err(FamilyError::Big(BigError::NonFinite));
        }
        match self {
            FamilyParams::H1(p) => Ok(&p.c * (&p.omega * x).sin()?),
            FamilyParams::H2(p) => p.eval(x),
            FamilyParams::H3(p) => p.eval_real(x),
            FamilyParams::HSigma(p) => p.eval(x),
            FamilyParams::H5(p) => p.eval(x),
        }
    }

    /// Like `evaluate`, additionally requiring `x ∈ [0, 1]`.
    pub fn evaluate_on_unit(&self, x: &BigReal) -> Result<BigReal> {
        if *x < 0.0 || *x > 1.0 {
            return Err(FamilyError::Domain(format!("x = {} outside [0, 1]", x.to_short(12))));
        }
        self.evaluate(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const B: u32 = 256;

    fn tiny() -> BigReal {
        BigReal::one(B).ldexp(-240)
    }

    #[test]
    fn single_wave_at_half_pi() {
        let p = FamilyParams::H2(SineSumParams::new(vec![Wave::from_f64(1.0, 1.0, 0.0, B)]).unwrap());
        let v = p.evaluate(&BigReal::pi(B).ldexp(-1)).unwrap();
        assert!((v - 1.0).abs() < tiny());
    }

    #[test]
    fn sine_of_sine_oracle() {
        let p = FamilyParams::H5(SineOfSineParams {
            c: BigReal::one(B),
            h: BigReal::zero(B),
            inner: SineSumParams::new(vec![Wave::from_f64(1.0, 1.0, 0.0, B)]).unwrap(),
        });
        let v = p.evaluate(&BigReal::pi(B).ldexp(-1)).unwrap();
        // sin(sin(π/2)) = sin(1), oracle at 512 bits
        let oracle = BigReal::one(512).sin().unwrap();
        assert!((v.to_bits(512) - oracle).abs() < tiny());
        assert!((v.to_f64() - 0.841_470_984_807_896_5).abs() < 1e-15);
    }

    #[test]
    fn sigma_domain_is_enforced() {
        let p = FamilyParams::HSigma(SigmaSineParams {
            sigma: Sigma::Sigmoid,
            c: BigReal::one(B),
            omega: BigReal::one(B),
            b: BigReal::from_f64(1.5, B),
            h: BigReal::zero(B),
        });
        assert!(matches!(p.evaluate(&BigReal::from_f64(0.5, B)), Err(FamilyError::Domain(_))));
        assert!(p.validate().is_err());
    }

    #[test]
    fn json_shape() {
        let p = FamilyParams::H1(SingleSineParams { c: BigReal::one(64), omega: BigReal::from_f64(2.0, 64) });
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v["family"], "H1");
        assert!(v["params"]["omega"].as_str().unwrap().ends_with("@64"));
        let back: FamilyParams = serde_json::from_value(v).unwrap();
        assert_eq!(back, p);
        let s: FamilyParams = serde_json::from_str(
            r#"{"family":"Hsigma","params":{"sigma":"tanh","c":"1@128","omega":"2","b":"0.5","h":"0"}}"#,
        )
        .unwrap();
        assert_eq!(s.tag(), "Hsigma");
        assert!(serde_json::from_str::<FamilyParams>(r#"{"family":"H2","params":{"waves":[]}}"#)
            .map(|p| p.validate().is_err())
            .unwrap_or(true));
    }

    #[test]
    fn derivative_of_sine_sum() {
        let p = SineSumParams::new(vec![Wave::from_f64(2.0, 3.0, 0.5, B)]).unwrap();
        let x = BigReal::from_f64(0.3, B);
        // d²/dx² 2 sin(3x + 0.5) = -18 sin(3x + 0.5)
        let d2 = p.derivative(&x, 2).unwrap();
        let expect = BigReal::from_f64(-18.0, B) * (BigReal::from_f64(3.0, B) * &x + 0.5).sin().unwrap();
        assert!((d2 - expect).abs() < tiny());
    }

    fn waves(n: usize) -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
        proptest::collection::vec((-3.0f64..3.0, -40.0f64..40.0, -4.0f64..4.0), 1..=n)
    }

    proptest! {
        #[test]
        fn sum_equals_sum_of_waves(ws in waves(5), x in 0.0f64..1.0) {
            let p = SineSumParams::new(ws.iter().map(|&(c, o, h)| Wave::from_f64(c, o, h, B)).collect()).unwrap();
            let x = BigReal::from_f64(x, B);
            let total = p.eval(&x).unwrap();
            let parts: BigReal = p.waves.iter().map(|w| w.eval(&x).unwrap()).sum();
            let tol = BigReal::epsilon(B) * (4.0 * ws.len() as f64) * 16.0;
            prop_assert!((total - parts).abs() <= tol);
        }

        #[test]
        fn phase_shift_by_two_pi(ws in waves(3), x in 0.0f64..1.0, k in 0usize..3) {
            let mut p = SineSumParams::new(ws.iter().map(|&(c, o, h)| Wave::from_f64(c, o, h, B)).collect()).unwrap();
            let x = BigReal::from_f64(x, B);
            let before = p.eval(&x).unwrap();
            let i = k % p.waves.len();
            p.waves[i].h = &p.waves[i].h + BigReal::two_pi(B);
            let after = p.eval(&x).unwrap();
            prop_assert!((before - after).abs() < tiny());
        }

        #[test]
        fn negation_is_exact(ws in waves(4), x in 0.0f64..1.0) {
            let p = SineSumParams::new(ws.iter().map(|&(c, o, h)| Wave::from_f64(c, o, h, B)).collect()).unwrap();
            let x = BigReal::from_f64(x, B);
            let a = p.eval(&x).unwrap();
            let b = p.negated().eval(&x).unwrap();
            prop_assert!((a.clone() + b).abs() <= a.abs() * BigReal::epsilon(B));
        }
    }
}
