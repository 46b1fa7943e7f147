//! Flat parameter vectors, residuals and analytic Jacobians.

use serde::{Deserialize, Serialize};
use xprlab_bignum::{BigReal, Real};
use xprlab_families::{FamilyParams, SigmaSineParams, SineOfSineParams, SineSumParams, SingleSineParams, Sigma, Wave};

use crate::{FitError, Result};

/// Family and structural sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum FamilySpec {
    H1,
    H2 { n: usize },
    #[serde(rename = "Hsigma")]
    HSigma { sigma: Sigma },
    H5 { n: usize },
}

impl FamilySpec {
    pub fn param_count(&self) -> usize {
        match self {
            FamilySpec::H1 => 2,
            FamilySpec::H2 { n } => 3 * n,
            FamilySpec::HSigma { .. } => 4,
            FamilySpec::H5 { n } => 2 + 3 * n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FamilySpec::H2 { n: 0 } | FamilySpec::H5 { n: 0 } => Err(FitError::Invalid("N must be at least 1".into())),
            _ => Ok(()),
        }
    }

    /// Member for a flat vector: H1 `(c, ω)`; H2 `(c, ω, h)` per wave;
    /// Hσ `(c, ω, β, h)` with `b = sin β`; H5 `(c, h)` then `(c, ω, h)` per inner wave.
    pub fn to_params<R: Real>(&self, theta: &[R], bits: u32) -> Result<FamilyParams> {
        let big = |v: &R| v.to_big(bits);
        let waves = |t: &[R]| t.chunks(3).map(|w| Wave::new(big(&w[0]), big(&w[1]), big(&w[2]))).collect::<Vec<_>>();
        Ok(match self {
            FamilySpec::H1 => FamilyParams::H1(SingleSineParams { c: big(&theta[0]), omega: big(&theta[1]) }),
            FamilySpec::H2 { .. } => FamilyParams::H2(SineSumParams { waves: waves(theta) }),
            FamilySpec::HSigma { sigma } => FamilyParams::HSigma(SigmaSineParams {
                sigma: sigma.clone(),
                c: big(&theta[0]),
                omega: big(&theta[1]),
                b: big(&theta[2]).sin()?,
                h: big(&theta[3]),
            }),
            FamilySpec::H5 { .. } => FamilyParams::H5(SineOfSineParams {
                c: big(&theta[0]),
                h: big(&theta[1]),
                inner: SineSumParams { waves: waves(&theta[2..]) },
            }),
        })
    }

    /// Inverse of [`FamilySpec::to_params`].
    pub fn flatten(&self, params: &FamilyParams) -> Result<Vec<BigReal>> {
        let flat = |s: &SineSumParams| s.waves.iter().flat_map(|w| [w.c.clone(), w.omega.clone(), w.h.clone()]).collect::<Vec<_>>();
        let v = match (self, params) {
            (FamilySpec::H1, FamilyParams::H1(p)) => vec![p.c.clone(), p.omega.clone()],
            (FamilySpec::H2 { n }, FamilyParams::H2(p)) if p.n() == *n => flat(p),
            (FamilySpec::HSigma { sigma }, FamilyParams::HSigma(p)) if p.sigma == *sigma => {
                vec![p.c.clone(), p.omega.clone(), p.b.asin()?, p.h.clone()]
            }
            (FamilySpec::H5 { n }, FamilyParams::H5(p)) if p.inner.n() == *n => {
                let mut v = vec![p.c.clone(), p.h.clone()];
                v.extend(flat(&p.inner));
                v
            }
            _ => return Err(FitError::Invalid("parameters do not match the family".into())),
        };
        Ok(v)
    }

    /// Residuals `g(x_k) − y_k` and the Jacobian rows `∂g(x_k)/∂θ`.
    pub fn residuals<R: Real>(&self, theta: &[R], xs: &[R], ys: &[R]) -> Result<(Vec<R>, Vec<Vec<R>>)> {
        let mut r = Vec::with_capacity(xs.len());
        let mut jac = Vec::with_capacity(xs.len());
        for (x, y) in xs.iter().zip(ys) {
            let (g, row) = self.point(theta, x)?;
            r.push(g - y.clone());
            jac.push(row);
        }
        Ok((r, jac))
    }

    fn point<R: Real>(&self, t: &[R], x: &R) -> Result<(R, Vec<R>)> {
        let zero = x.lift(0.0);
        Ok(match self {
            FamilySpec::H1 => {
                let phi = t[1].clone() * x.clone();
                let (s, c) = (phi.sin_r()?, phi.cos_r()?);
                (t[0].clone() * s.clone(), vec![s, t[0].clone() * x.clone() * c])
            }
            FamilySpec::H2 { .. } => {
                let mut g = zero;
                let mut row = Vec::with_capacity(t.len());
                for w in t.chunks(3) {
                    let phi = w[1].clone() * x.clone() + w[2].clone();
                    let (s, c) = (phi.sin_r()?, phi.cos_r()?);
                    g = g + w[0].clone() * s.clone();
                    let cc = w[0].clone() * c;
                    row.extend([s, cc.clone() * x.clone(), cc]);
                }
                (g, row)
            }
            FamilySpec::HSigma { sigma } => {
                let (c, omega, beta, h) = (&t[0], &t[1], &t[2], &t[3]);
                let b = beta.sin_r()?;
                let z = b * x.clone();
                let s = sigma.eval(&z)?;
                let ds = sigma.d1(&z)?;
                let phi = omega.clone() * s.clone() + h.clone();
                let (sp, cp) = (phi.sin_r()?, phi.cos_r()?);
                let cc = c.clone() * cp;
                let d_beta = cc.clone() * omega.clone() * ds * x.clone() * beta.cos_r()?;
                (c.clone() * sp.clone(), vec![sp, cc.clone() * s, d_beta, cc])
            }
            FamilySpec::H5 { .. } => {
                let mut inner = zero;
                let mut parts = Vec::with_capacity(t.len() - 2);
                for w in t[2..].chunks(3) {
                    let psi = w[1].clone() * x.clone() + w[2].clone();
                    let (s, c) = (psi.sin_r()?, psi.cos_r()?);
                    inner = inner + w[0].clone() * s.clone();
                    let ac = w[0].clone() * c;
                    parts.push((s, ac.clone() * x.clone(), ac));
                }
                let (so, co) = (inner.sin_r()?, inner.cos_r()?);
                let k = t[0].clone() * co;
                let mut row = vec![so.clone(), x.lift(1.0)];
                for (a, b, c) in parts {
                    row.extend([k.clone() * a, k.clone() * b, k.clone() * c]);
                }
                (t[0].clone() * so + t[1].clone(), row)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn specs() -> Vec<(FamilySpec, Vec<f64>)> {
        vec![
            (FamilySpec::H1, vec![1.3, 4.0]),
            (FamilySpec::H2 { n: 2 }, vec![0.5, 3.0, 0.2, -1.1, 7.0, 2.0]),
            (FamilySpec::HSigma { sigma: Sigma::Sigmoid }, vec![1.2, 9.0, 0.6, 0.4]),
            (FamilySpec::HSigma { sigma: Sigma::Gaussian }, vec![0.7, -5.0, 1.1, 0.1]),
            (FamilySpec::H5 { n: 1 }, vec![0.8, 0.3, 2.0, 3.0, 0.5]),
        ]
    }

    #[test]
    fn jacobians_match_central_differences() {
        for (spec, theta) in specs() {
            let x = 0.37;
            let (_, row) = spec.point(&theta, &x).unwrap();
            for j in 0..theta.len() {
                let h = 1e-6;
                let (mut up, mut dn) = (theta.clone(), theta.clone());
                up[j] += h;
                dn[j] -= h;
                let fd = (spec.point(&up, &x).unwrap().0 - spec.point(&dn, &x).unwrap().0) / (2.0 * h);
                assert!((fd - row[j]).abs() < 1e-6 * (1.0 + fd.abs()), "{spec:?} param {j}: {fd} vs {}", row[j]);
            }
        }
    }

    #[test]
    fn model_matches_family_evaluation() {
        for (spec, theta) in specs() {
            let p = spec.to_params(&theta, 128).unwrap();
            let x = BigReal::from_f64(0.61, 128);
            let want = p.evaluate(&x).unwrap().to_f64();
            let got = spec.point(&theta, &0.61).unwrap().0;
            assert!((want - got).abs() < 1e-12, "{spec:?}");
            let back = spec.flatten(&p).unwrap();
            let again = spec.to_params(&back, 128).unwrap();
            assert!((again.evaluate(&x).unwrap().to_f64() - want).abs() < 1e-12);
        }
    }
}
