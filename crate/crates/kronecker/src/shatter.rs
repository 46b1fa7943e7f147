use serde::{Deserialize, Serialize};
use xprlab_bignum::BigReal;
use xprlab_families::{FamilyParams, SingleSineParams, Wave};

use crate::orbit::{solve_orbit_with, DiophantineInstance, OrbitOptions};
use crate::{KroneckerError, NotFound, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn parse(s: &str) -> Option<Vec<Sign>> {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                '+' => Some(Sign::Plus),
                '-' | '−' => Some(Sign::Minus),
                _ => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShatterInstance {
    pub points: Vec<BigReal>,
    pub pattern: Vec<Sign>,
    pub delta: BigReal,
}

impl ShatterInstance {
    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(KroneckerError::Invalid("no points".into()));
        }
        if self.points.len() != self.pattern.len() {
            return Err(KroneckerError::Invalid("pattern and points differ in length".into()));
        }
        if self.delta.signum() <= 0 {
            return Err(KroneckerError::Invalid("margin must be positive".into()));
        }
        Ok(())
    }
}

/// Sign conflict on equally spaced triples.
///
/// Any `g = c·sin(ωx + h)` obeys `g(x−v) + g(x+v) = 2·g(x)·cos(ωv)`. When the
/// outer two signs agree the left side has their sign, which fixes the sign
/// of `cos(ωv)`; two triples with the same `v` may demand opposite signs.
pub fn sign_obstruction(points: &[BigReal], pattern: &[Sign]) -> Option<NotFound> {
    let n = points.len();
    let bits = points.iter().map(BigReal::bits).max()?;
    let tol = BigReal::one(bits).ldexp(-(bits as i32) / 2);
    // (step, required sign of cos, triple)
    let mut seen: Vec<(BigReal, i32, [usize; 3])> = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if i == j {
                continue;
            }
            for k in 0..n {
                if k == i || k == j || pattern[k] != pattern[i] {
                    continue;
                }
                let v = &points[j] - &points[i];
                if v.signum() <= 0 || (&points[k] - &points[j] - &v).abs() > &tol * v.abs().max(&BigReal::one(bits)) {
                    continue;
                }
                let need = pattern[i].value() * pattern[j].value();
                let triple = [i, j, k];
                if let Some((step, _, first)) =
                    seen.iter().find(|(s, want, _)| *want != need && (s - &v).abs() <= &tol * v.abs().max(&BigReal::one(bits)))
                {
                    return Some(NotFound::SignObstruction { step: step.clone(), first: *first, second: triple });
                }
                seen.push((v, need, triple));
            }
        }
    }
    None
}

pub fn shatter(inst: &ShatterInstance) -> Result<FamilyParams> {
    shatter_with(inst, &OrbitOptions::default())
}

/// An `H1` member `c·sin(ωx)` with `s_k·c·sin(ω x_k) > δ` for every point.
pub fn shatter_with(inst: &ShatterInstance, opts: &OrbitOptions) -> Result<FamilyParams> {
    inst.validate()?;
    if let Some(w) = sign_obstruction(&inst.points, &inst.pattern) {
        return Err(KroneckerError::NotFound(w));
    }
    let bits = inst.points.iter().map(BigReal::bits).chain([inst.delta.bits()]).max().unwrap();
    let c = inst.delta.ldexp(1).max(&BigReal::one(bits));
    let pi = BigReal::pi(bits);
    let theta = inst
        .pattern
        .iter()
        .map(|s| match s {
            Sign::Plus => pi.ldexp(-1),
            Sign::Minus => &pi * 1.5,
        })
        .collect();
    // c·cos(d) > δ whenever the phase error d is below acos(δ/c)
    let ratio = &inst.delta / &c;
    let eps = (BigReal::one(bits) - ratio.square()).sqrt()?.atan2(&ratio);
    let orbit = DiophantineInstance::new(inst.points.clone(), theta, eps)?;
    let sol = solve_orbit_with(&orbit, opts)?;
    let params = FamilyParams::H1(SingleSineParams { c, omega: sol.omega });
    for (x, s) in inst.points.iter().zip(&inst.pattern) {
        let v = params.evaluate(x)? * BigReal::from_i64(s.value() as i64, bits);
        if v <= inst.delta {
            return Err(KroneckerError::Inconclusive("margin check failed".into()));
        }
    }
    Ok(params)
}

/// `|g(u) + g(u+2v) − 2·g(u+v)·cos(ωv)|` for `g(x) = c·sin(ωx + h)`.
pub fn three_term_identity_residual(wave: &Wave, u: &BigReal, v: &BigReal) -> Result<BigReal> {
    let g0 = wave.eval(u)?;
    let g1 = wave.eval(&(u + v))?;
    let g2 = wave.eval(&(u + v.ldexp(1)))?;
    let c = (&wave.omega * v).cos()?;
    Ok((g0 + g2 - g1.ldexp(1) * c).abs())
}
