use std::fmt::Display;

use serde_json::json;
use xprlab_bignum::linalg::{self, Matrix};
use xprlab_bignum::BigReal;

use crate::{default_tolerance, sample_with, CertKind, Certificate, CertifyError, Result};

fn distinct(v: &[BigReal]) -> bool {
    v.iter().enumerate().all(|(i, a)| v[i + 1..].iter().all(|b| a != b))
}

/// `|det A| / Π‖row‖`, or zero for an all-zero matrix.
pub fn det_of_matrix(a: &Matrix) -> Result<BigReal> {
    let d = linalg::det(a)?;
    let scale = linalg::hadamard_bound(a);
    if scale.is_zero() {
        return Ok(scale);
    }
    Ok(d.abs() / scale)
}

/// `A = (g(x₀ + α_k + β_m))`, a `(2N+1)`-square matrix that is singular for
/// every sum of `N` sine waves.
pub fn det_certificate<E: Display>(
    g: impl Fn(&BigReal) -> std::result::Result<BigReal, E>,
    x0: &BigReal,
    alphas: &[BigReal],
    betas: &[BigReal],
    n: usize,
    tol: Option<BigReal>,
) -> Result<Certificate> {
    let size = 2 * n + 1;
    if n == 0 {
        return Err(CertifyError::Invalid("N must be at least 1".into()));
    }
    if alphas.len() != size || betas.len() != size {
        return Err(CertifyError::Invalid(format!("need {size} alphas and betas")));
    }
    if !distinct(alphas) || !distinct(betas) {
        return Err(CertifyError::Degenerate("alphas and betas must be pairwise distinct".into()));
    }
    let bits = alphas.iter().chain(betas).chain([x0]).map(BigReal::bits).max().unwrap();
    let mut a: Matrix = Vec::with_capacity(size);
    for al in alphas {
        let row = betas.iter().map(|be| sample_with(&g, &(x0 + al + be))).collect::<Result<Vec<_>>>()?;
        a.push(row);
    }
    let residual = det_of_matrix(&a)?;
    let tolerance = tol.unwrap_or_else(|| default_tolerance(bits));
    let short = |v: &[BigReal]| v.iter().map(|x| x.to_short(12)).collect::<Vec<_>>();
    Ok(Certificate::new(
        CertKind::Det,
        residual,
        tolerance,
        json!({ "n": n, "x0": x0.to_short(20), "alphas": short(alphas), "betas": short(betas), "bits": bits }),
    ))
}

/// Determinant certificate on a progression: `α = β = (0, h, …, 2N·h)`, using `4N+1` samples.
pub fn hankel_certificate(values: &[BigReal], n: usize, tol: Option<BigReal>) -> Result<Certificate> {
    let size = 2 * n + 1;
    if values.len() < 2 * size - 1 {
        return Err(CertifyError::Length { s: 2 * size - 2, m: values.len().saturating_sub(1) });
    }
    let bits = values.iter().map(BigReal::bits).max().unwrap();
    let a: Matrix = (0..size).map(|i| values[i..i + size].to_vec()).collect();
    let residual = det_of_matrix(&a)?;
    let tolerance = tol.unwrap_or_else(|| default_tolerance(bits));
    Ok(Certificate::new(CertKind::Det, residual, tolerance, json!({ "n": n, "hankel": true, "bits": bits })))
}
