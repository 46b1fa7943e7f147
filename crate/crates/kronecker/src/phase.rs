//! Linear phase systems modulo 2π.
//!
//! Find real `u` in a box and integers `n` with
//! `|(A u)_k − θ_k − 2π n_k| < ε` for every row `k`. Eliminating `u` by a
//! ridge fit leaves a positive definite quadratic form in `n`,
//! `f(n) = g(n)ᵀ (ε² I + A B² Aᵀ)⁻¹ g(n)` with `g(n) = 2π n + θ − A u₀`,
//! and every feasible `n` has `f(n) ≤ K + p`. The integer points of that
//! ellipsoid are enumerated on an LLL-reduced basis.

use xprlab_bignum::linalg::{self, Matrix};
use xprlab_bignum::{BigError, BigReal};

use crate::lattice;

pub const LLL_DELTA: f64 = 0.99;

#[derive(Debug, Clone)]
pub struct PhaseSystem {
    /// K × p direction matrix.
    pub a: Matrix,
    /// Box center `u₀` and half-widths, length p.
    pub center: Vec<BigReal>,
    pub half_width: Vec<BigReal>,
    /// Target phases, length K.
    pub theta: Vec<BigReal>,
    pub eps: BigReal,
}

#[derive(Debug, Clone)]
pub struct PhaseCandidate {
    /// Integer winding numbers.
    pub n: Vec<BigReal>,
    /// Ridge estimate of the continuous unknowns.
    pub u: Vec<BigReal>,
    /// Value of the quadratic form; feasible points have `score ≤ K + p`.
    pub score: BigReal,
}

#[derive(Debug, Clone)]
pub struct PhaseSearch {
    pub candidates: Vec<PhaseCandidate>,
    pub complete: bool,
}

impl PhaseSystem {
    fn bits(&self) -> u32 {
        self.eps.bits().max(self.theta.iter().map(BigReal::bits).max().unwrap_or(0))
    }

    /// Enumerates `n` with `f(n) ≤ radius2` (defaults to `K + p`), best first.
    pub fn search(&self, radius2: Option<BigReal>, cap: usize) -> Result<PhaseSearch, BigError> {
        let k = self.theta.len();
        let p = self.center.len();
        if self.a.len() != k || self.a.iter().any(|r| r.len() != p) || self.half_width.len() != p {
            return Err(BigError::Dimension("phase system shapes disagree".into()));
        }
        let bits = self.work_bits();
        let up = |v: &[BigReal]| v.iter().map(|x| x.to_bits(bits)).collect::<Vec<_>>();
        let sys = PhaseSystem {
            a: self.a.iter().map(|r| up(r)).collect(),
            center: up(&self.center),
            half_width: up(&self.half_width),
            theta: up(&self.theta),
            eps: self.eps.to_bits(bits),
        };
        let out = sys.search_at(radius2.map(|r| r.to_bits(bits)), cap, bits)?;
        let home = self.bits();
        let candidates = out
            .candidates
            .into_iter()
            .map(|c| PhaseCandidate { n: c.n.iter().map(|v| v.to_bits(home)).collect(), ..c })
            .collect();
        Ok(PhaseSearch { candidates, complete: out.complete })
    }

    /// The Gram matrix has condition up to `(max|A|·B/ε)²`; enough extra bits to invert it.
    fn work_bits(&self) -> u32 {
        let bits = self.bits();
        let spread = self.a.iter().flatten().map(|v| v.abs().to_f64()).fold(0.0, f64::max)
            * self.half_width.iter().map(|v| v.abs().to_f64()).fold(0.0, f64::max)
            / self.eps.to_f64();
        let extra = if spread > 1.0 { 2.0 * spread.log2() } else { 0.0 };
        bits + (extra.ceil() as u32).next_multiple_of(64)
    }

    fn search_at(&self, radius2: Option<BigReal>, cap: usize, bits: u32) -> Result<PhaseSearch, BigError> {
        let k = self.theta.len();
        let p = self.center.len();
        let two_pi = BigReal::two_pi(bits);
        let b2: Vec<BigReal> = self.half_width.iter().map(BigReal::square).collect();
        let mut m = vec![vec![BigReal::zero(bits); k]; k];
        for i in 0..k {
            for j in 0..k {
                let mut s = BigReal::zero(bits);
                for l in 0..p {
                    s += &self.a[i][l] * &self.a[j][l] * &b2[l];
                }
                if i == j {
                    s += self.eps.square();
                }
                m[i][j] = s;
            }
        }
        let g = linalg::inverse(&m)?;
        let l = linalg::cholesky(&g)?;
        let shift: Vec<BigReal> = linalg::matvec(&self.a, &self.center)?;
        let theta: Vec<BigReal> = self.theta.iter().zip(&shift).map(|(t, s)| t - s).collect();
        // quadratic form ‖Lᵀ(2πn + θ')‖²: basis rows 2π·L[j,:], target −Lᵀθ'
        let rows: Vec<Vec<BigReal>> = (0..k).map(|j| l[j].iter().map(|v| v * &two_pi).collect()).collect();
        let target: Vec<BigReal> = (0..k).map(|i| -(0..k).map(|j| &l[j][i] * &theta[j]).sum::<BigReal>()).collect();
        let red = lattice::lll(&rows, LLL_DELTA);
        let r2 = radius2.unwrap_or_else(|| BigReal::from_i64((k + p) as i64, bits));
        let found = lattice::enumerate_close(&red.rows, &target, &r2, cap);
        let at = linalg::transpose(&self.a);
        let mut candidates = Vec::with_capacity(found.points.len());
        for (mcoef, score) in found.points {
            let n: Vec<BigReal> = (0..k)
                .map(|j| mcoef.iter().zip(&red.transform).map(|(c, row)| c * &row[j]).sum())
                .collect();
            let gvec: Vec<BigReal> = n.iter().zip(&theta).map(|(ni, t)| ni * &two_pi + t).collect();
            let gg = linalg::matvec(&g, &gvec)?;
            let w = linalg::matvec(&at, &gg)?;
            let u = w.iter().zip(&b2).zip(&self.center).map(|((wi, bi), ci)| wi * bi + ci).collect();
            candidates.push(PhaseCandidate { n, u, score });
        }
        Ok(PhaseSearch { candidates, complete: found.complete })
    }
}
