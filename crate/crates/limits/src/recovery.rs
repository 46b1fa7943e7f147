//! Coefficients of `u_s = Σ s^m (b_{km} z_k^s + conj) + Σ b_{±,m} s^m (±1)^s`
//! from the samples, one coefficient at a time through deflated shift operators.

use serde::{Deserialize, Serialize};
use xprlab_bignum::{BigComplex, BigReal};
use xprlab_families::SampleGrid;

use crate::{LimitsError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub z: BigComplex,
    pub multiplicity: usize,
}

impl Root {
    fn is_real(&self, tol: &BigReal) -> bool {
        self.z.im.abs() <= *tol
    }

    /// Number of basis sequences: `2M` for `±1`, `M` conjugate pairs otherwise.
    fn degrees(&self, tol: &BigReal) -> usize {
        if self.is_real(tol) { 2 * self.multiplicity } else { self.multiplicity }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryInstance {
    pub samples: SampleGrid,
    pub roots: Vec<Root>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveredRoot {
    pub z: BigComplex,
    pub multiplicity: usize,
    pub real: bool,
    /// `b_m` for `m = 0, 1, …`; real roots give real values.
    pub b: Vec<BigComplex>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recovered {
    pub roots: Vec<RecoveredRoot>,
    /// Largest sample left after subtracting every recovered term.
    pub residual: BigReal,
}

type Poly = Vec<BigComplex>;

fn mul_linear(p: &Poly, root: &BigComplex) -> Poly {
    // p(T)·(T − root)
    let bits = root.bits();
    let mut out = vec![BigComplex::zero(bits); p.len() + 1];
    for (j, c) in p.iter().enumerate() {
        out[j + 1] = &out[j + 1] + c;
        out[j] = &out[j] - &(c * root);
    }
    out
}

fn apply(p: &Poly, seq: &[BigComplex]) -> Vec<BigComplex> {
    let deg = p.len() - 1;
    (0..seq.len().saturating_sub(deg))
        .map(|s| p.iter().zip(&seq[s..]).fold(BigComplex::zero(seq[0].bits()), |acc, (c, u)| &acc + &(c * u)))
        .collect()
}

fn basis(z: &BigComplex, m: usize, len: usize) -> Vec<BigComplex> {
    let bits = z.bits();
    let mut zs = BigComplex::one(bits);
    (0..len)
        .map(|s| {
            let v = zs.scale(&BigReal::from_i64(s as i64, bits).powi(m as i32));
            zs = &zs * z;
            v
        })
        .collect()
}

/// Shift operator with `skip` factors `(T − roots[index].z)` removed.
fn deflated(roots: &[Root], tol: &BigReal, index: usize, skip: usize, bits: u32) -> Poly {
    let mut p = vec![BigComplex::one(bits)];
    for (i, r) in roots.iter().enumerate() {
        let own = if i == index { skip } else { 0 };
        if r.is_real(tol) {
            let z = BigComplex::from_real(r.z.re.clone());
            for _ in 0..2 * r.multiplicity - own {
                p = mul_linear(&p, &z);
            }
        } else {
            for _ in 0..r.multiplicity - own {
                p = mul_linear(&p, &r.z);
            }
            for _ in 0..r.multiplicity {
                p = mul_linear(&p, &r.z.conj());
            }
        }
    }
    p
}

fn validate(inst: &RecoveryInstance, bits: u32) -> Result<BigReal> {
    let tol = BigReal::one(bits).ldexp(-(bits as i32) / 4);
    if inst.roots.is_empty() {
        return Err(LimitsError::Invalid("no roots".into()));
    }
    for r in &inst.roots {
        if r.multiplicity == 0 {
            return Err(LimitsError::Invalid("multiplicities must be at least 1".into()));
        }
        if (r.z.abs() - 1.0).abs() > tol {
            return Err(LimitsError::Invalid("roots must lie on the unit circle".into()));
        }
    }
    for (i, a) in inst.roots.iter().enumerate() {
        for b in &inst.roots[i + 1..] {
            let d = (&a.z - &b.z).abs().min(&(&a.z - &b.z.conj()).abs());
            if d <= tol {
                return Err(LimitsError::Rank(format!("roots {} apart", d.to_short(6))));
            }
        }
        if !a.is_real(&tol) && a.z.im.abs() <= tol.ldexp(1) {
            return Err(LimitsError::Rank("complex root too close to the real axis".into()));
        }
    }
    let n2: usize = inst.roots.iter().map(|r| r.degrees(&tol) * if r.is_real(&tol) { 1 } else { 2 }).sum();
    if inst.samples.values.len() < n2 {
        return Err(LimitsError::Invalid(format!("need at least {n2} samples, got {}", inst.samples.values.len())));
    }
    Ok(tol)
}

/// Recovers every coefficient; synthesizing them reproduces the samples.
pub fn recover_coefficients(inst: &RecoveryInstance) -> Result<Recovered> {
    let bits = inst.samples.values.iter().map(BigReal::bits).max().unwrap_or(256);
    let tol = validate(inst, bits)?;
    let len = inst.samples.values.len();
    let mut rest: Vec<BigComplex> = inst.samples.values.iter().cloned().map(BigComplex::from_real).collect();
    let mut out = Vec::with_capacity(inst.roots.len());
    for (k, root) in inst.roots.iter().enumerate() {
        let real = root.is_real(&tol);
        let z = if real { BigComplex::from_real(root.z.re.clone()) } else { root.z.clone() };
        let top = root.degrees(&tol);
        let mut b = vec![BigComplex::zero(bits); top];
        for q in 1..=top {
            let m = top - q;
            let p = deflated(&inst.roots, &tol, k, q, bits);
            let w = apply(&p, &rest);
            let v = basis(&z, m, len);
            let e = apply(&p, &v);
            let num = e.iter().zip(&w).fold(BigComplex::zero(bits), |acc, (ei, wi)| &acc + &(&ei.conj() * wi));
            let den: BigReal = e.iter().map(BigComplex::norm_sqr).sum();
            if den.is_zero() {
                return Err(LimitsError::Rank("deflated operator annihilates its own basis sequence".into()));
            }
            let mut coef = num.scale(&den.recip());
            if real {
                coef = BigComplex::from_real(coef.re);
                for (r, vi) in rest.iter_mut().zip(&v) {
                    *r = &*r - &(&coef * vi);
                }
            } else {
                for (r, vi) in rest.iter_mut().zip(&v) {
                    let t = &coef * vi;
                    *r = &*r - &BigComplex::from_real(t.re.ldexp(1));
                }
            }
            b[m] = coef;
        }
        out.push(RecoveredRoot { z: root.z.clone(), multiplicity: root.multiplicity, real, b });
    }
    let residual = rest.iter().fold(BigReal::zero(bits), |m, r| m.max(&r.abs()));
    Ok(Recovered { roots: out, residual })
}

/// Samples `u_0..u_{len−1}` of the expansion.
pub fn synthesize(roots: &[RecoveredRoot], len: usize, bits: u32) -> Vec<BigReal> {
    let mut u = vec![BigReal::zero(bits); len];
    for r in roots {
        for (m, b) in r.b.iter().enumerate() {
            let v = basis(&r.z, m, len);
            for (ui, vi) in u.iter_mut().zip(&v) {
                let t = b * vi;
                *ui += if r.real { t.re } else { t.re.ldexp(1) };
            }
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: u32 = 256;

    fn grid(values: Vec<BigReal>) -> SampleGrid {
        let m = values.len() - 1;
        SampleGrid::new(BigReal::zero(B), BigReal::one(B), m, values).unwrap()
    }

    fn unit(theta: f64) -> BigComplex {
        BigComplex::from_polar(&BigReal::one(B), &BigReal::from_f64(theta, B)).unwrap()
    }

    fn c(re: f64, im: f64) -> BigComplex {
        BigComplex::from_f64(re, im, B)
    }

    #[test]
    fn affine_sequence_at_one() {
        let u: Vec<BigReal> = (0..4).map(|s| BigReal::from_i64(3 + 2 * s, B)).collect();
        let inst = RecoveryInstance { samples: grid(u), roots: vec![Root { z: c(1.0, 0.0), multiplicity: 1 }] };
        let r = recover_coefficients(&inst).unwrap();
        assert!((r.roots[0].b[0].re.clone() - 3.0).abs() < 1e-70);
        assert!((r.roots[0].b[1].re.clone() - 2.0).abs() < 1e-70);
    }

    #[test]
    fn single_complex_root() {
        let root = RecoveredRoot { z: unit(0.7), multiplicity: 1, real: false, b: vec![c(1.0, 0.5)] };
        let u = synthesize(&[root.clone()], 7, B);
        let inst = RecoveryInstance { samples: grid(u), roots: vec![Root { z: unit(0.7), multiplicity: 1 }] };
        let r = recover_coefficients(&inst).unwrap();
        let err = (&r.roots[0].b[0] - &root.b[0]).abs();
        assert!(err < BigReal::one(B).ldexp(-128));
    }

    #[test]
    fn conjugate_pair_is_one_root() {
        let inst = RecoveryInstance {
            samples: grid(vec![BigReal::one(B); 8]),
            roots: vec![Root { z: unit(0.7), multiplicity: 1 }, Root { z: unit(-0.7), multiplicity: 1 }],
        };
        assert!(matches!(recover_coefficients(&inst), Err(LimitsError::Rank(_))));
    }

    #[test]
    fn leading_filter_scale_matches_the_closed_form() {
        // D_{k,1} s^{M−1} z^s = (M−1)! z^{M−1} (z − z̄)^M Π_{k'} ((z − z_{k'})(z − z̄_{k'}))^{M_{k'}} z^s
        let roots = vec![Root { z: unit(0.7), multiplicity: 2 }, Root { z: unit(2.0), multiplicity: 1 }, Root { z: c(-1.0, 0.0), multiplicity: 1 }];
        let tol = BigReal::one(B).ldexp(-64);
        let p = deflated(&roots, &tol, 0, 1, B);
        let z = unit(0.7);
        let e = apply(&p, &basis(&z, 1, 10));
        let zbar = z.conj();
        let diff = &z - &zbar;
        let w = unit(2.0);
        let other = &(&z - &w) * &(&z - &w.conj());
        let minus = &z - &c(-1.0, 0.0);
        let closed = &(&(&z * &diff.powi(2)) * &other) * &minus.powi(2);
        for (s, es) in e.iter().enumerate() {
            let want = &closed * &z.powi(s as u32);
            assert!((es - &want).abs() < BigReal::one(B).ldexp(-200));
        }
    }
}
