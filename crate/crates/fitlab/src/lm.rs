//! Damped Gauss-Newton with multiplicative damping control.

use xprlab_bignum::Real;

use crate::model::FamilySpec;

/// `Ax = b` by Gaussian elimination with partial pivoting; `None` if singular.
pub(crate) fn solve<R: Real>(mut a: Vec<Vec<R>>, mut b: Vec<R>) -> Option<Vec<R>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs_r().partial_cmp(&a[j][col].abs_r()).unwrap_or(std::cmp::Ordering::Equal))?;
        if !a[piv][col].is_finite_r() || a[piv][col].abs_r().as_f64() == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col].clone() / a[col][col].clone();
            for k in col..n {
                let v = a[row][k].clone() - f.clone() * a[col][k].clone();
                a[row][k] = v;
            }
            let v = b[row].clone() - f * b[col].clone();
            b[row] = v;
        }
    }
    let mut x = b.clone();
    for i in (0..n).rev() {
        let mut s = b[i].clone();
        for k in i + 1..n {
            s = s - a[i][k].clone() * x[k].clone();
        }
        x[i] = s / a[i][i].clone();
    }
    x.iter().all(Real::is_finite_r).then_some(x)
}

pub(crate) struct Outcome<R> {
    pub theta: Vec<R>,
    pub max_residual: f64,
}

fn cost<R: Real>(spec: &FamilySpec, theta: &[R], xs: &[R], ys: &[R]) -> Option<(f64, Vec<R>, Vec<Vec<R>>)> {
    let (r, j) = spec.residuals(theta, xs, ys).ok()?;
    let c: f64 = r.iter().map(|v| v.as_f64().powi(2)).sum();
    c.is_finite().then_some((c, r, j))
}

fn max_abs<R: Real>(r: &[R]) -> f64 {
    r.iter().map(|v| v.as_f64().abs()).fold(0.0, f64::max)
}

/// Minimizes `Σ r_k²`; stops once `max |r_k| < stop`, after `max_iter`
/// Jacobian evaluations, or when damping runs away.
pub(crate) fn levenberg_marquardt<R: Real>(
    spec: &FamilySpec,
    theta: Vec<R>,
    xs: &[R],
    ys: &[R],
    max_iter: usize,
    stop: f64,
) -> Option<Outcome<R>> {
    let (mut c, mut r, mut jac) = cost(spec, &theta, xs, ys)?;
    let mut theta = theta;
    let mut lambda = 1e-3;
    let p = theta.len();
    let like = xs[0].clone();
    for _ in 0..max_iter {
        if max_abs(&r) < stop {
            break;
        }
        let mut a = vec![vec![like.lift(0.0); p]; p];
        let mut g = vec![like.lift(0.0); p];
        for (row, rk) in jac.iter().zip(&r) {
            for i in 0..p {
                g[i] = g[i].clone() + row[i].clone() * rk.clone();
                for k in i..p {
                    a[i][k] = a[i][k].clone() + row[i].clone() * row[k].clone();
                }
            }
        }
        for i in 0..p {
            for k in 0..i {
                a[i][k] = a[k][i].clone();
            }
        }
        let mut accepted = false;
        while lambda < 1e16 {
            let mut damped = a.clone();
            for (i, row) in damped.iter_mut().enumerate() {
                let d = a[i][i].clone() * like.lift(lambda) + like.lift(lambda * 1e-12);
                row[i] = row[i].clone() + d;
            }
            let step = solve(damped, g.iter().map(|v| -v.clone()).collect());
            if let Some(step) = step {
                let trial: Vec<R> = theta.iter().zip(&step).map(|(t, s)| t.clone() + s.clone()).collect();
                if let Some((ct, rt, jt)) = cost(spec, &trial, xs, ys) {
                    if ct < c {
                        (theta, c, r, jac) = (trial, ct, rt, jt);
                        lambda = (lambda / 2.0).max(1e-15);
                        accepted = true;
                        break;
                    }
                }
            }
            lambda *= 2.0;
        }
        if !accepted {
            break;
        }
    }
    Some(Outcome { max_residual: max_abs(&r), theta })
}
