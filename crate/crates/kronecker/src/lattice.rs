//! LLL reduction and bounded enumeration on real bases.

use xprlab_bignum::BigReal;

/// Basis rows together with the unimodular transform that produced them
/// from the input rows: `rows = transform · input`.
#[derive(Debug, Clone)]
pub struct Reduced {
    pub rows: Vec<Vec<BigReal>>,
    pub transform: Vec<Vec<BigReal>>,
}

fn dot(a: &[BigReal], b: &[BigReal]) -> BigReal {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(dst: &mut [BigReal], q: &BigReal, src: &[BigReal]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d -= q * s;
    }
}

struct Gso {
    mu: Vec<Vec<BigReal>>,
    norms: Vec<BigReal>,
}

fn gram_schmidt(rows: &[Vec<BigReal>], bits: u32) -> Gso {
    let n = rows.len();
    let mut star: Vec<Vec<BigReal>> = Vec::with_capacity(n);
    let mut mu = vec![vec![BigReal::zero(bits); n]; n];
    let mut norms = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = rows[i].clone();
        for j in 0..i {
            mu[i][j] = if norms[j] == BigReal::zero(bits) { BigReal::zero(bits) } else { dot(&rows[i], &star[j]) / &norms[j] };
            axpy(&mut v, &mu[i][j], &star[j]);
        }
        norms.push(dot(&v, &v));
        star.push(v);
    }
    Gso { mu, norms }
}

/// LLL reduction with parameter `delta` (Cohen, Alg. 2.6.3 in real arithmetic).
pub fn lll(input: &[Vec<BigReal>], delta: f64) -> Reduced {
    let n = input.len();
    let bits = input.iter().flatten().map(BigReal::bits).max().unwrap_or(256);
    let mut rows = input.to_vec();
    let mut transform: Vec<Vec<BigReal>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigReal::one(bits) } else { BigReal::zero(bits) }).collect())
        .collect();
    if n < 2 {
        return Reduced { rows, transform };
    }
    let Gso { mut mu, mut norms } = gram_schmidt(&rows, bits);
    let half = BigReal::from_f64(0.5, bits);

    let size_reduce = |k: usize, l: usize, rows: &mut Vec<Vec<BigReal>>, transform: &mut Vec<Vec<BigReal>>, mu: &mut Vec<Vec<BigReal>>| {
        if mu[k][l].abs() > half {
            let q = mu[k][l].round();
            let (lo, hi) = rows.split_at_mut(k);
            axpy(&mut hi[0], &q, &lo[l]);
            let (lo, hi) = transform.split_at_mut(k);
            axpy(&mut hi[0], &q, &lo[l]);
            mu[k][l] -= &q;
            for j in 0..l {
                let t = &q * &mu[l][j];
                mu[k][j] -= t;
            }
        }
    };

    let mut k = 1;
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        if guard > 1_000_000 {
            break;
        }
        size_reduce(k, k - 1, &mut rows, &mut transform, &mut mu);
        let lhs = norms[k].clone();
        let rhs = (BigReal::from_f64(delta, bits) - mu[k][k - 1].square()) * &norms[k - 1];
        if lhs < rhs {
            let m = mu[k][k - 1].clone();
            let b = &norms[k] + m.square() * &norms[k - 1];
            rows.swap(k, k - 1);
            transform.swap(k, k - 1);
            if b.is_zero() {
                let g = gram_schmidt(&rows, bits);
                mu = g.mu;
                norms = g.norms;
            } else {
                mu[k][k - 1] = &m * &norms[k - 1] / &b;
                norms[k] = &norms[k - 1] * &norms[k] / &b;
                norms[k - 1] = b;
                for j in 0..k - 1 {
                    let t = mu[k][j].clone();
                    mu[k][j] = mu[k - 1][j].clone();
                    mu[k - 1][j] = t;
                }
                for i in k + 1..n {
                    let t = mu[i][k].clone();
                    mu[i][k] = &mu[i][k - 1] - &m * &t;
                    mu[i][k - 1] = t + &mu[k][k - 1] * &mu[i][k];
                }
            }
            k = (k - 1).max(1);
        } else {
            for l in (0..k - 1).rev() {
                size_reduce(k, l, &mut rows, &mut transform, &mut mu);
            }
            k += 1;
        }
    }
    Reduced { rows, transform }
}

/// Squared Gram-Schmidt norms of `rows`.
pub fn gso_norms(rows: &[Vec<BigReal>]) -> Vec<BigReal> {
    let bits = rows.iter().flatten().map(BigReal::bits).max().unwrap_or(256);
    gram_schmidt(rows, bits).norms
}

/// Babai nearest-plane coefficients of `target` in the basis `rows`.
pub fn babai(rows: &[Vec<BigReal>], target: &[BigReal]) -> Vec<BigReal> {
    let bits = rows.iter().flatten().map(BigReal::bits).max().unwrap_or(256);
    let n = rows.len();
    let mut star: Vec<Vec<BigReal>> = Vec::with_capacity(n);
    let g = gram_schmidt(rows, bits);
    for i in 0..n {
        let mut v = rows[i].clone();
        for j in 0..i {
            axpy(&mut v, &g.mu[i][j], &star[j]);
        }
        star.push(v);
    }
    let mut t = target.to_vec();
    let mut coef = vec![BigReal::zero(bits); n];
    for i in (0..n).rev() {
        let c = (dot(&t, &star[i]) / &g.norms[i]).round();
        axpy(&mut t, &c, &rows[i]);
        coef[i] = c;
    }
    coef
}

/// Lattice points near a target.
#[derive(Debug, Clone)]
pub struct Enumeration {
    /// Integer coefficient vectors (in the given basis) and squared distances.
    pub points: Vec<(Vec<BigReal>, BigReal)>,
    /// False when the cap cut the search short.
    pub complete: bool,
}

/// All integer `m` with `‖Σ m_i rows_i − target‖² ≤ radius2`, up to `cap` points.
///
/// `rows` must span the space `target` lives in (full-rank square basis).
pub fn enumerate_close(rows: &[Vec<BigReal>], target: &[BigReal], radius2: &BigReal, cap: usize) -> Enumeration {
    let n = rows.len();
    let bits = rows.iter().flatten().map(BigReal::bits).max().unwrap_or(256);
    let g = gram_schmidt(rows, bits);
    let mut star: Vec<Vec<BigReal>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = rows[i].clone();
        for j in 0..i {
            axpy(&mut v, &g.mu[i][j], &star[j]);
        }
        star.push(v);
    }
    let tc: Vec<BigReal> = (0..n).map(|i| dot(target, &star[i]) / &g.norms[i]).collect();
    let mut residual = target.to_vec();
    for s in &star {
        let c = dot(&residual, s) / dot(s, s);
        axpy(&mut residual, &c, s);
    }
    let base = dot(&residual, &residual);

    struct Walk<'a> {
        mu: &'a [Vec<BigReal>],
        norms: &'a [BigReal],
        tc: &'a [BigReal],
        r2: BigReal,
        m: Vec<BigReal>,
        out: Vec<(Vec<BigReal>, BigReal)>,
        cap: usize,
        truncated: bool,
    }

    fn rec(w: &mut Walk<'_>, i: usize, dist: BigReal) {
        if w.out.len() >= w.cap {
            w.truncated = true;
            return;
        }
        let n = w.m.len();
        let mut c = w.tc[i].clone();
        for j in i + 1..n {
            c -= &w.m[j] * &w.mu[j][i];
        }
        if w.norms[i].is_zero() {
            return;
        }
        let slack = &w.r2 - &dist;
        if slack.is_negative() {
            return;
        }
        let r = (slack / &w.norms[i]).sqrt().unwrap_or_else(|_| BigReal::zero(dist.bits()));
        let lo = (&c - &r).floor() + 1.0;
        let hi = (&c + &r).floor();
        let mut v = lo.clone();
        // walk outwards from the center so the closest points come first
        let mut order = Vec::new();
        while v <= hi {
            order.push(v.clone());
            v += 1.0;
            if order.len() > 1_000_000 {
                w.truncated = true;
                break;
            }
        }
        order.sort_by(|a, b| (a - &c).abs().partial_cmp(&(b - &c).abs()).unwrap());
        for mi in order {
            let d = &dist + (&mi - &c).square() * &w.norms[i];
            if d > w.r2 {
                continue;
            }
            w.m[i] = mi;
            if i == 0 {
                w.out.push((w.m.clone(), d));
                if w.out.len() >= w.cap {
                    w.truncated = true;
                    return;
                }
            } else {
                rec(w, i - 1, d);
                if w.truncated && w.out.len() >= w.cap {
                    return;
                }
            }
        }
        w.m[i] = BigReal::zero(dist.bits());
    }

    if n == 0 {
        return Enumeration { points: vec![(Vec::new(), base)], complete: true };
    }
    let mut w = Walk {
        mu: &g.mu,
        norms: &g.norms,
        tc: &tc,
        r2: radius2.to_bits(bits),
        m: vec![BigReal::zero(bits); n],
        out: Vec::new(),
        cap,
        truncated: false,
    };
    rec(&mut w, n - 1, base);
    let mut points = w.out;
    points.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    Enumeration { points, complete: !w.truncated }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> Vec<BigReal> {
        xs.iter().map(|&x| BigReal::from_f64(x, 256)).collect()
    }

    fn apply(t: &[Vec<BigReal>], b: &[Vec<BigReal>]) -> Vec<Vec<BigReal>> {
        t.iter()
            .map(|r| (0..b[0].len()).map(|j| r.iter().zip(b).map(|(c, row)| c * &row[j]).sum()).collect())
            .collect()
    }

    #[test]
    fn reduces_a_skewed_basis() {
        let b = vec![v(&[1.0, 0.0, 0.0]), v(&[4.0, 1.0, 0.0]), v(&[7.0, 3.0, 1.0])];
        let r = lll(&b, 0.99);
        // unimodular: the transform reproduces the rows
        assert_eq!(apply(&r.transform, &b), r.rows);
        for row in &r.rows {
            let n2: BigReal = row.iter().map(BigReal::square).sum();
            assert!(n2 <= 2.0, "{row:?}");
        }
    }

    #[test]
    fn lovasz_condition_holds() {
        let b = vec![v(&[201.0, 37.0]), v(&[1648.0, 297.0])];
        let r = lll(&b, 0.99);
        let n = gso_norms(&r.rows);
        assert!(n[1] >= &n[0] * 0.5);
    }

    #[test]
    fn enumeration_finds_all_close_points() {
        let b = vec![v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        let t = v(&[0.3, 0.4]);
        let e = enumerate_close(&b, &t, &BigReal::from_f64(1.0, 256), 100);
        assert!(e.complete);
        // brute force oracle
        let mut count = 0;
        for i in -3..=3 {
            for j in -3..=3 {
                let d = (i as f64 - 0.3).powi(2) + (j as f64 - 0.4).powi(2);
                if d <= 1.0 {
                    count += 1;
                }
            }
        }
        assert_eq!(e.points.len(), count);
        assert_eq!(e.points[0].0, v(&[0.0, 0.0]));
        let c = babai(&b, &t);
        assert_eq!(c, v(&[0.0, 0.0]));
    }

    #[test]
    fn cap_marks_incomplete() {
        let b = vec![v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        let e = enumerate_close(&b, &v(&[0.0, 0.0]), &BigReal::from_f64(100.0, 256), 5);
        assert!(!e.complete);
        assert_eq!(e.points.len(), 5);
    }
}
