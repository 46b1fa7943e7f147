use serde::Serialize;
use xprlab_bignum::BigReal;

use crate::lattice;
use crate::KroneckerError;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Independence {
    /// No integer relation with `max |λ_k| ≤ bound` exists.
    IndependentUpTo { bound: u64 },
    /// `Σ λ_k x_k = 0` within `2^(-bits/2)`.
    Relation { lambda: Vec<i64> },
}

const EXHAUSTIVE_LIMIT: f64 = 4.0e6;

fn relation_holds(points: &[BigReal], lambda: &[i64], tol: &BigReal) -> bool {
    let bits = tol.bits();
    let s: BigReal = points.iter().zip(lambda).map(|(x, &l)| x * BigReal::from_i64(l, bits)).sum();
    s.abs() <= *tol
}

fn normalize(lambda: &mut [i64]) {
    if let Some(first) = lambda.iter().find(|&&l| l != 0) {
        if *first < 0 {
            lambda.iter_mut().for_each(|l| *l = -*l);
        }
    }
}

/// Searches integer relations `Σ λ_k x_k = 0` with `max |λ_k| ≤ bound`.
///
/// An LLL-reduced relation lattice either yields a short relation or certifies
/// through its Gram-Schmidt norms that none exists; if neither, small cases
/// fall back to exhaustive enumeration.
pub fn rational_independence_check(points: &[BigReal], bound: u64) -> Result<Independence, KroneckerError> {
    if bound < 1 {
        return Err(KroneckerError::Invalid("coefficient bound must be at least 1".into()));
    }
    let n = points.len();
    if n == 0 {
        return Err(KroneckerError::Invalid("no points".into()));
    }
    let bits = points.iter().map(BigReal::bits).max().unwrap();
    let half = (bits / 2) as i32;
    let tol = BigReal::one(bits).ldexp(-half);
    if let Some(k) = points.iter().position(BigReal::is_zero) {
        let mut lambda = vec![0; n];
        lambda[k] = 1;
        return Ok(Independence::Relation { lambda });
    }
    if n == 1 {
        return Ok(Independence::IndependentUpTo { bound });
    }
    let scale = BigReal::one(bits).ldexp(half);
    let rows: Vec<Vec<BigReal>> = (0..n)
        .map(|i| {
            let mut r: Vec<BigReal> = (0..n).map(|j| if i == j { BigReal::one(bits) } else { BigReal::zero(bits) }).collect();
            r.push(&points[i] * &scale);
            r
        })
        .collect();
    let red = lattice::lll(&rows, 0.99);
    let mut best: Option<Vec<i64>> = None;
    for row in &red.rows {
        let lambda: Option<Vec<i64>> = row[..n].iter().map(BigReal::to_i64).collect();
        let Some(mut lambda) = lambda else { continue };
        if lambda.iter().all(|&l| l == 0) || lambda.iter().any(|&l| l.unsigned_abs() > bound) {
            continue;
        }
        if relation_holds(points, &lambda, &tol) {
            normalize(&mut lambda);
            let size = lambda.iter().map(|l| l.unsigned_abs()).max().unwrap();
            if best.as_ref().map_or(true, |b| size < b.iter().map(|l| l.unsigned_abs()).max().unwrap()) {
                best = Some(lambda);
            }
        }
    }
    if let Some(lambda) = best {
        return Ok(Independence::Relation { lambda });
    }
    // any relation within tolerance is a lattice vector of squared norm ≤ nL² + 1
    let min_gs = lattice::gso_norms(&red.rows).into_iter().fold(None::<BigReal>, |m, v| match m {
        None => Some(v),
        Some(m) => Some(m.min(&v)),
    });
    let limit = BigReal::from_f64(bound as f64, bits).square() * (n as f64) + 1.0;
    if min_gs.is_some_and(|g| g > limit) {
        return Ok(Independence::IndependentUpTo { bound });
    }
    let space = (2.0 * bound as f64 + 1.0).powi(n as i32);
    if space > EXHAUSTIVE_LIMIT {
        return Err(KroneckerError::Inconclusive(format!(
            "lattice certificate too weak for bound {bound} at {bits} bits"
        )));
    }
    exhaustive(points, bound as i64, &tol)
}

fn exhaustive(points: &[BigReal], bound: i64, tol: &BigReal) -> Result<Independence, KroneckerError> {
    let n = points.len();
    let mut lambda = vec![-bound; n];
    let mut best: Option<Vec<i64>> = None;
    loop {
        if lambda.iter().any(|&l| l != 0) && relation_holds(points, &lambda, tol) {
            let size = lambda.iter().map(|l| l.unsigned_abs()).max().unwrap();
            if best.as_ref().map_or(true, |b| size < b.iter().map(|l| l.unsigned_abs()).max().unwrap()) {
                let mut l = lambda.clone();
                normalize(&mut l);
                best = Some(l);
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return Ok(match best {
                    Some(lambda) => Independence::Relation { lambda },
                    None => Independence::IndependentUpTo { bound: bound as u64 },
                });
            }
            lambda[i] += 1;
            if lambda[i] > bound {
                lambda[i] = -bound;
                i += 1;
            } else {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: f64) -> BigReal {
        BigReal::from_f64(x, 256)
    }

    #[test]
    fn one_and_two() {
        assert_eq!(
            rational_independence_check(&[b(1.0), b(2.0)], 10).unwrap(),
            Independence::Relation { lambda: vec![2, -1] }
        );
    }

    #[test]
    fn one_and_sqrt_two() {
        let s2 = BigReal::from_i64(2, 256).sqrt().unwrap();
        assert_eq!(
            rational_independence_check(&[b(1.0), s2], 1_000_000).unwrap(),
            Independence::IndependentUpTo { bound: 1_000_000 }
        );
    }

    #[test]
    fn tenths() {
        let pts: Vec<BigReal> = [3, 6, 9].iter().map(|&k| BigReal::ratio(k, 10, 256)).collect();
        match rational_independence_check(&pts, 3).unwrap() {
            Independence::Relation { lambda } => {
                let s: i64 = lambda.iter().zip([3, 6, 9]).map(|(l, k)| l * k).sum();
                assert_eq!(s, 0);
                assert!(lambda.iter().all(|l| l.abs() <= 3));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exhaustive_fallback_agrees() {
        let pts = [b(0.25), b(0.75)];
        let tol = BigReal::one(256).ldexp(-128);
        assert_eq!(exhaustive(&pts, 4, &tol).unwrap(), Independence::Relation { lambda: vec![3, -1] });
    }
}
