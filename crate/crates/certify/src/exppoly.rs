use serde_json::json;
use xprlab_bignum::{BigComplex, BigReal};
use xprlab_families::SampleGrid;

use crate::counting::binomial;
use crate::{default_tolerance, CertKind, Certificate, CertifyError, Result};

/// Forward difference `h^(-s)·Δ^s` of the samples; `m - s + 1` values.
pub fn discrete_derivative(grid: &SampleGrid, s: usize) -> Result<SampleGrid> {
    if s > grid.m {
        return Err(CertifyError::Length { s, m: grid.m });
    }
    let bits = grid.values.iter().map(BigReal::bits).chain([grid.h.bits()]).max().unwrap();
    let coef: Vec<BigReal> = (0..=s)
        .map(|k| {
            let c = BigReal::from_f64(binomial(s as u64, k as u64) as f64, bits);
            if (s - k) % 2 == 1 { -c } else { c }
        })
        .collect();
    let scale = grid.h.powi(-(s as i32));
    let values: Vec<BigReal> = (0..=grid.m - s)
        .map(|j| coef.iter().zip(&grid.values[j..]).map(|(c, v)| c * v).sum::<BigReal>() * &scale)
        .collect();
    let out = SampleGrid::new(grid.a.clone(), grid.h.clone(), grid.m - s, values)
        .map_err(|e| CertifyError::Invalid(e.to_string()))?;
    Ok(out)
}

/// Logs along the grid, each branch chosen within π of its predecessor.
fn continued_logs(values: &[BigComplex]) -> Result<Vec<BigComplex>> {
    let bits = values.iter().map(BigComplex::bits).max().unwrap_or(256);
    let floor = default_tolerance(bits);
    let two_pi = BigReal::two_pi(bits);
    let mut out: Vec<BigComplex> = Vec::with_capacity(values.len());
    for (index, v) in values.iter().enumerate() {
        if v.abs() < floor {
            return Err(CertifyError::ZeroSample { index });
        }
        let mut l = v.ln()?;
        if let Some(prev) = out.last() {
            let turns = ((&prev.im - &l.im) / &two_pi).round();
            l.im += turns * &two_pi;
        }
        out.push(l);
    }
    Ok(out)
}

/// Largest `|Σ_k (−1)^k C(d+1,k) Log g(x + (j+k)h)|` over windows `j`,
/// imaginary part reduced into `(−π, π]`.
pub fn exp_poly_certificate(grid: &SampleGrid<BigComplex>, d: usize, tol: Option<BigReal>) -> Result<Certificate> {
    if grid.m < d + 1 {
        return Err(CertifyError::Length { s: d + 1, m: grid.m });
    }
    let bits = grid.values.iter().map(BigComplex::bits).max().unwrap();
    let logs = continued_logs(&grid.values)?;
    let two_pi = BigReal::two_pi(bits);
    let pi = BigReal::pi(bits);
    let coef: Vec<BigReal> = (0..=d + 1)
        .map(|k| {
            let c = BigReal::from_f64(binomial(d as u64 + 1, k as u64) as f64, bits);
            if k % 2 == 1 { -c } else { c }
        })
        .collect();
    let mut worst = BigReal::zero(bits);
    let mut at = 0;
    for j in 0..=grid.m - d - 1 {
        let mut re = BigReal::zero(bits);
        let mut im = BigReal::zero(bits);
        for (c, l) in coef.iter().zip(&logs[j..]) {
            re += c * &l.re;
            im += c * &l.im;
        }
        im -= ((&im + &pi) / &two_pi).floor() * &two_pi;
        let r = re.hypot(&im);
        if r > worst {
            worst = r;
            at = j;
        }
    }
    let tolerance = tol.unwrap_or_else(|| default_tolerance(bits));
    Ok(Certificate::new(
        CertKind::ExpPoly,
        worst,
        tolerance,
        json!({ "d": d, "a": grid.a.to_short(20), "h": grid.h.to_short(20), "m": grid.m, "worst_window": at }),
    ))
}

pub fn exp_poly_certificate_real(grid: &SampleGrid, d: usize, tol: Option<BigReal>) -> Result<Certificate> {
    let values = grid.values.iter().cloned().map(BigComplex::from_real).collect();
    let c = SampleGrid::new(grid.a.clone(), grid.h.clone(), grid.m, values)
        .map_err(|e| CertifyError::Invalid(e.to_string()))?;
    exp_poly_certificate(&c, d, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const B: u32 = 256;

    fn real_grid(f: impl Fn(BigReal) -> BigReal, a: f64, h: f64, m: usize) -> SampleGrid {
        let (a, h) = (BigReal::from_f64(a, B), BigReal::from_f64(h, B));
        let values = (0..=m).map(|k| f(&a + &h * (k as f64))).collect();
        SampleGrid::new(a, h, m, values).unwrap()
    }

    fn exp_of(p: impl Fn(&BigReal) -> BigReal) -> impl Fn(BigReal) -> BigReal {
        move |x| p(&x).exp().unwrap()
    }

    #[test]
    fn constant_differences_vanish() {
        let g = real_grid(|_| BigReal::from_f64(2.5, B), 0.0, 0.1, 4);
        let d = discrete_derivative(&g, 1).unwrap();
        assert_eq!(d.m, 3);
        assert!(d.values.iter().all(BigReal::is_zero));
    }

    #[test]
    fn cubes_have_third_difference_six() {
        let g = real_grid(|x| x.powi(3), 0.0, 1.0, 6);
        let d = discrete_derivative(&g, 3).unwrap();
        assert!(d.values.iter().all(|v| *v == 6.0));
        assert!(matches!(discrete_derivative(&g, 7), Err(CertifyError::Length { .. })));
    }

    proptest! {
        #[test]
        fn polynomials_are_annihilated(coef in proptest::collection::vec(-3.0f64..3.0, 1..6), h in 0.01f64..0.5, a in -1.0f64..1.0) {
            let deg = coef.len() - 1;
            let g = real_grid(|x| coef.iter().rev().fold(BigReal::zero(B), |acc, c| acc * &x + *c), a, h, deg + 3);
            let d = discrete_derivative(&g, deg + 1).unwrap();
            let fact: f64 = (1..=deg + 1).map(|k| k as f64).product();
            let bound = BigReal::from_f64(fact * 2f64.powi(10) * h.powi(-(deg as i32) - 1), B).ldexp(-(B as i32));
            for v in &d.values {
                prop_assert!(v.abs() < bound.clone() * 1e3);
            }
        }
    }

    #[test]
    fn exp_x_level_one() {
        let g = real_grid(exp_of(|x| x.clone()), 0.2, 0.3, 5);
        assert!(exp_poly_certificate_real(&g, 1, None).unwrap().pass);
    }

    #[test]
    fn quadratic_exponent_passes_at_level_two() {
        let g = real_grid(exp_of(|x| x.square() - x * 3.0), 0.0, 0.1, 3);
        let c = exp_poly_certificate_real(&g, 2, None).unwrap();
        assert!(c.pass);
        // product oracle at 512 bits: g0·g2^3 = g1^3·g3
        let e = |k: f64| {
            let x = BigReal::from_f64(0.1, 512) * k;
            (x.square() - &x * 3.0).exp().unwrap()
        };
        let lhs = e(0.0) * e(2.0).powi(3);
        let rhs = e(1.0).powi(3) * e(3.0);
        assert!(((lhs / rhs) - 1.0).abs() < BigReal::one(512).ldexp(-400));
    }

    #[test]
    fn cubic_exponent_fails_at_level_two() {
        let g = real_grid(exp_of(|x| x.powi(3)), 0.0, 0.1, 3);
        let c = exp_poly_certificate_real(&g, 2, None).unwrap();
        assert!(!c.pass);
        // -Δ³(x³) = -6h³
        assert!((c.residual.to_f64() - 6e-3).abs() < 1e-12);
    }

    #[test]
    fn winding_phases_follow_the_branch() {
        // e^{i·20x} wraps several times over the grid
        let values: Vec<BigComplex> = (0..=12)
            .map(|k| {
                let x = BigReal::from_f64(0.1, B) * (k as f64);
                BigComplex::new(BigReal::zero(B), &x * 20.0).exp().unwrap()
            })
            .collect();
        let g = SampleGrid::new(BigReal::zero(B), BigReal::from_f64(0.1, B), 12, values).unwrap();
        assert!(exp_poly_certificate(&g, 1, None).unwrap().pass);
    }

    #[test]
    fn zero_samples_rejected() {
        let g = real_grid(|x| x, 0.0, 0.1, 3);
        assert!(matches!(exp_poly_certificate_real(&g, 1, None), Err(CertifyError::ZeroSample { index: 0 })));
    }
}
