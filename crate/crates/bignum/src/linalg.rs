//! Dense linear algebra on `BigReal` matrices stored as row vectors.

use crate::{BigError, BigReal, Result};

pub type Matrix = Vec<Vec<BigReal>>;

fn check_square(a: &Matrix) -> Result<usize> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(BigError::Dimension(format!("expected square matrix of order {n}")));
    }
    Ok(n)
}

fn bits_of(a: &Matrix) -> u32 {
    a.iter().flatten().map(BigReal::bits).max().unwrap_or_else(crate::default_bits)
}

pub fn identity(n: usize, bits: u32) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigReal::one(bits) } else { BigReal::zero(bits) }).collect())
        .collect()
}

pub fn transpose(a: &Matrix) -> Matrix {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let inner = b.len();
    if a.iter().any(|r| r.len() != inner) {
        return Err(BigError::Dimension("matmul inner sizes differ".into()));
    }
    let cols = b.first().map_or(0, Vec::len);
    Ok(a.iter()
        .map(|r| (0..cols).map(|j| r.iter().zip(b).map(|(x, row)| x * &row[j]).sum()).collect())
        .collect())
}

pub fn matvec(a: &Matrix, v: &[BigReal]) -> Result<Vec<BigReal>> {
    if a.iter().any(|r| r.len() != v.len()) {
        return Err(BigError::Dimension("matvec sizes differ".into()));
    }
    Ok(a.iter().map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum()).collect())
}

pub fn dot(a: &[BigReal], b: &[BigReal]) -> BigReal {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Product of Euclidean row norms, an upper bound on `|det a|`.
pub fn hadamard_bound(a: &Matrix) -> BigReal {
    let bits = bits_of(a);
    a.iter().fold(BigReal::one(bits), |acc, r| {
        let n2: BigReal = r.iter().map(BigReal::square).sum();
        acc * n2.sqrt().expect("sum of squares")
    })
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(a: &Matrix) -> Result<BigReal> {
    let n = check_square(a)?;
    let bits = bits_of(a);
    let mut m = a.clone();
    let mut d = BigReal::one(bits);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[i][k].abs().partial_cmp(&m[j][k].abs()).unwrap())
            .unwrap();
        if m[p][k].is_zero() {
            return Ok(BigReal::zero(bits));
        }
        if p != k {
            m.swap(p, k);
            d = -d;
        }
        d = &d * &m[k][k];
        for i in k + 1..n {
            let f = &m[i][k] / &m[k][k];
            for j in k + 1..n {
                let t = &f * &m[k][j];
                m[i][j] -= t;
            }
        }
    }
    Ok(d)
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: &Matrix, b: &[BigReal]) -> Result<Vec<BigReal>> {
    let n = check_square(a)?;
    if b.len() != n {
        return Err(BigError::Dimension("right-hand side length".into()));
    }
    let cols: Matrix = b.iter().map(|v| vec![v.clone()]).collect();
    let x = solve_many(a, &cols)?;
    Ok(x.into_iter().map(|mut r| r.remove(0)).collect())
}

fn solve_many(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let n = check_square(a)?;
    let w = b.first().map_or(0, Vec::len);
    let mut m: Matrix = a.iter().zip(b).map(|(r, s)| r.iter().chain(s).cloned().collect()).collect();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[i][k].abs().partial_cmp(&m[j][k].abs()).unwrap())
            .unwrap();
        if m[p][k].is_zero() {
            return Err(BigError::Singular);
        }
        m.swap(p, k);
        for i in k + 1..n {
            let f = &m[i][k] / &m[k][k];
            for j in k..n + w {
                let t = &f * &m[k][j];
                m[i][j] -= t;
            }
        }
    }
    let bits = bits_of(a);
    let mut x = vec![vec![BigReal::zero(bits); w]; n];
    for c in 0..w {
        for i in (0..n).rev() {
            let mut s = m[i][n + c].clone();
            for j in i + 1..n {
                s -= &m[i][j] * &x[j][c];
            }
            x[i][c] = s / &m[i][i];
        }
    }
    Ok(x)
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let n = check_square(a)?;
    solve_many(a, &identity(n, bits_of(a)))
}

/// Lower-triangular `l` with `a = l lᵀ` for symmetric positive definite `a`.
pub fn cholesky(a: &Matrix) -> Result<Matrix> {
    let n = check_square(a)?;
    let bits = bits_of(a);
    let mut l = vec![vec![BigReal::zero(bits); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j].clone();
            for k in 0..j {
                s -= &l[i][k] * &l[j][k];
            }
            if i == j {
                if s.signum() <= 0 {
                    return Err(BigError::Domain("matrix is not positive definite".into()));
                }
                l[i][i] = s.sqrt()?;
            } else {
                l[i][j] = s / &l[j][j];
            }
        }
    }
    Ok(l)
}

/// Maximum absolute row sum.
pub fn norm_inf(a: &Matrix) -> BigReal {
    let bits = bits_of(a);
    a.iter()
        .map(|r| r.iter().map(BigReal::abs).sum::<BigReal>())
        .fold(BigReal::zero(bits), |m, v| m.max(&v))
}

/// Condition number in the ∞-norm; `None` when singular.
pub fn condition_inf(a: &Matrix) -> Option<BigReal> {
    let inv = inverse(a).ok()?;
    Some(norm_inf(a) * norm_inf(&inv))
}
