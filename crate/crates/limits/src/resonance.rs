use serde::{Deserialize, Serialize};
use xprlab_bignum::{linalg, BigComplex, BigReal};
use xprlab_certify::binomial;
use xprlab_families::{SineSumParams, Wave};

use crate::{LimitsError, Result};

fn check_factor(factor: &BigReal) -> Result<()> {
    let bits = factor.bits();
    let log2 = factor.abs().log2()?.to_f64();
    if log2 > (bits / 2) as f64 {
        return Err(LimitsError::Overflow { log2 });
    }
    Ok(())
}

/// `m+1` waves converging to `x^m·sin(ωx + h)` as `Δω → 0`: an `m`-th forward
/// difference in ω of `sin(ωx + h − πm/2)`.
pub fn resonance_combo(omega: &BigReal, h: &BigReal, m: u32, dw: &BigReal) -> Result<SineSumParams> {
    if dw.signum() <= 0 {
        return Err(LimitsError::Invalid("Δω must be positive".into()));
    }
    let bits = omega.bits().max(h.bits()).max(dw.bits());
    let factor = dw.powi(-(m as i32));
    check_factor(&factor)?;
    let phase = h - BigReal::pi(bits).ldexp(-1) * f64::from(m);
    let waves = (0..=m)
        .map(|n| {
            let c = &factor * BigReal::from_f64(binomial(m.into(), n.into()) as f64, bits);
            let c = if (m - n) % 2 == 1 { -c } else { c };
            Wave::new(c, omega + dw * f64::from(n), phase.clone())
        })
        .collect();
    Ok(SineSumParams::new(waves)?)
}

/// Sums waves that share a frequency into one: `Σ c_j sin(ωx + h_j) = C sin(ωx + H)`.
///
/// Frequencies keep their first-appearance order.
pub fn merge_waves(waves: &[Wave]) -> Vec<Wave> {
    let mut out: Vec<(BigReal, BigComplex)> = Vec::new();
    for w in waves {
        let phasor = BigComplex::from_polar(&w.c, &w.h).expect("finite phase");
        match out.iter_mut().find(|(om, _)| *om == w.omega) {
            Some((_, acc)) => *acc = &*acc + &phasor,
            None => out.push((w.omega.clone(), phasor)),
        }
    }
    out.into_iter().map(|(omega, z)| Wave::new(z.abs(), omega, z.arg())).collect()
}

/// `M₀` waves at frequencies `(2s−1)Δω` converging to the polynomial with
/// coefficients `coef` (degree ≤ `2M₀−1`).
///
/// The polynomial is expanded in shifted odd powers `(x − x_j)^{2M₀−1}` at
/// Chebyshev shifts in `[−0.5, 1.5]`; each power is the limit of
/// `Δω^{-(2M₀−1)} sin^{2M₀−1}(Δω(x − x_j))`, an odd sine power.
pub fn polynomial_combo(m0: usize, coef: &[BigReal], dw: &BigReal) -> Result<SineSumParams> {
    if m0 < 1 {
        return Err(LimitsError::Invalid("M₀ must be at least 1".into()));
    }
    if dw.signum() <= 0 {
        return Err(LimitsError::Invalid("Δω must be positive".into()));
    }
    let deg = 2 * m0 - 1;
    if coef.len() > deg + 1 {
        return Err(LimitsError::Invalid(format!("degree {} exceeds 2M₀−1 = {deg}", coef.len() - 1)));
    }
    let bits = coef.iter().map(BigReal::bits).chain([dw.bits()]).max().unwrap();
    let pi = BigReal::pi(bits);
    let nodes: Vec<BigReal> = (0..=deg)
        .map(|j| {
            let angle = &pi * ((2 * j + 1) as f64) / BigReal::from_i64(2 * (deg as i64 + 1), bits);
            angle.cos().map(|c| c + 0.5)
        })
        .collect::<std::result::Result<_, _>>()?;
    // row i: coefficient of x^i in (x − x_j)^deg
    let a: Vec<Vec<BigReal>> = (0..=deg)
        .map(|i| {
            nodes
                .iter()
                .map(|xj| {
                    let c = BigReal::from_f64(binomial(deg as u64, i as u64) as f64, bits);
                    c * (-xj).powi((deg - i) as i32)
                })
                .collect()
        })
        .collect();
    if let Some(cond) = linalg::condition_inf(&a) {
        let log2 = cond.log2()?.to_f64();
        if log2 > (bits / 4) as f64 {
            return Err(LimitsError::IllConditioned { log2 });
        }
    } else {
        return Err(LimitsError::IllConditioned { log2: f64::INFINITY });
    }
    let mut rhs: Vec<BigReal> = coef.iter().map(|c| c.to_bits(bits)).collect();
    rhs.resize(deg + 1, BigReal::zero(bits));
    let weights = linalg::solve(&a, &rhs)?;

    // sin^{2n+1}θ = 4^{-n} Σ_k (−1)^k C(2n+1, n−k) sin((2k+1)θ)
    let n = m0 - 1;
    let factor = dw.powi(-(deg as i32));
    check_factor(&factor)?;
    let scale = &factor * BigReal::one(bits).ldexp(-2 * n as i32);
    let mut waves = Vec::with_capacity(m0 * (deg + 1));
    for k in 0..=n {
        let odd = (2 * k + 1) as f64;
        let c = BigReal::from_f64(binomial(deg as u64, (n - k) as u64) as f64, bits);
        let c = if k % 2 == 1 { -c } else { c };
        for (w, xj) in weights.iter().zip(&nodes) {
            waves.push(Wave::new(w * &c * &scale, dw * odd, -(dw * xj * odd)));
        }
    }
    Ok(SineSumParams::new(merge_waves(&waves))?)
}

/// `Σ_m c_m x^m sin(ωx + h_m)`, `m = 0..M−1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonantTerm {
    pub omega: BigReal,
    pub amps: Vec<BigReal>,
    pub phases: Vec<BigReal>,
}

impl ResonantTerm {
    pub fn multiplicity(&self) -> usize {
        self.amps.len()
    }
}

/// A polynomial of degree ≤ `2M₀−1` plus resonant terms; realizable by `M₀ + Σ M_k` waves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonantTarget {
    pub m0: usize,
    pub poly: Vec<BigReal>,
    pub terms: Vec<ResonantTerm>,
}

impl ResonantTarget {
    pub fn validate(&self) -> Result<()> {
        if self.poly.len() > 2 * self.m0 {
            return Err(LimitsError::Invalid(format!("polynomial part needs degree ≤ 2M₀−1 = {}", 2 * self.m0 as i64 - 1)));
        }
        for t in &self.terms {
            if t.amps.is_empty() || t.amps.len() != t.phases.len() {
                return Err(LimitsError::Invalid("each term needs M ≥ 1 amplitudes and as many phases".into()));
            }
        }
        Ok(())
    }

    /// `N = M₀ + Σ M_k`.
    pub fn wave_budget(&self) -> usize {
        self.m0 + self.terms.iter().map(ResonantTerm::multiplicity).sum::<usize>()
    }

    pub fn eval(&self, x: &BigReal) -> Result<BigReal> {
        let bits = x.bits();
        let mut acc = self.poly.iter().rev().fold(BigReal::zero(bits), |acc, c| acc * x + c);
        for t in &self.terms {
            let mut xm = BigReal::one(bits);
            for (c, h) in t.amps.iter().zip(&t.phases) {
                acc += c * &xm * (&t.omega * x + h).sin()?;
                xm *= x;
            }
        }
        Ok(acc)
    }

    /// Exactly `wave_budget()` waves approximating the target to `O(Δω)`.
    pub fn realize(&self, dw: &BigReal) -> Result<SineSumParams> {
        self.validate()?;
        let bits = dw.bits();
        let mut waves = Vec::with_capacity(self.wave_budget());
        if self.m0 > 0 {
            let poly = if self.poly.is_empty() { vec![BigReal::zero(bits)] } else { self.poly.clone() };
            let mut p = polynomial_combo(self.m0, &poly, dw)?.waves;
            // a vanishing merged amplitude still occupies its slot
            while p.len() < self.m0 {
                p.push(Wave::new(BigReal::zero(bits), dw * (2 * p.len() + 1) as f64, BigReal::zero(bits)));
            }
            waves.extend(p);
        }
        for t in &self.terms {
            let mut slots: Vec<Wave> = (0..t.multiplicity())
                .map(|n| Wave::new(BigReal::zero(bits), &t.omega + dw * n as f64, BigReal::zero(bits)))
                .collect();
            for (m, (c, h)) in t.amps.iter().zip(&t.phases).enumerate() {
                for w in resonance_combo(&t.omega, h, m as u32, dw)?.waves {
                    slots.push(Wave::new(&w.c * c, w.omega, w.h));
                }
            }
            waves.extend(merge_waves(&slots));
        }
        Ok(SineSumParams::new(waves)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sup_distance;

    const B: u32 = 256;

    fn b(x: f64) -> BigReal {
        BigReal::from_f64(x, B)
    }

    fn dist(p: &SineSumParams, f: impl Fn(&BigReal) -> BigReal + Sync, n: usize) -> f64 {
        sup_distance(|x: &BigReal| p.eval(x), |x: &BigReal| Ok::<_, xprlab_families::FamilyError>(f(x)), n, B)
            .unwrap()
            .to_f64()
    }

    #[test]
    fn degree_zero_is_exact() {
        let p = resonance_combo(&b(3.0), &b(0.4), 0, &b(0.01)).unwrap();
        assert_eq!(p.n(), 1);
        assert!(dist(&p, |x| (x * 3.0 + 0.4).sin().unwrap(), 200) < 1e-70);
    }

    #[test]
    fn first_order_resonance() {
        let p = resonance_combo(&b(3.0), &b(0.0), 1, &b(1e-3)).unwrap();
        assert_eq!(p.n(), 2);
        assert!(dist(&p, |x| x * (x * 3.0).sin().unwrap(), 2000) <= 5e-4);
    }

    #[test]
    fn overflow_is_reported() {
        let r = resonance_combo(&b(1.0), &b(0.0), 40, &b(1e-4));
        assert!(matches!(r, Err(LimitsError::Overflow { .. })));
    }

    #[test]
    fn merging_adds_phasors() {
        let w = merge_waves(&[Wave::from_f64(1.0, 2.0, 0.0, B), Wave::from_f64(1.0, 2.0, std::f64::consts::FRAC_PI_2, B)]);
        assert_eq!(w.len(), 1);
        assert!((w[0].c.to_f64() - 2f64.sqrt()).abs() < 1e-15);
        assert!((w[0].h.to_f64() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn identity_from_one_wave() {
        let dw = b(1e-2);
        let p = polynomial_combo(1, &[b(0.0), b(1.0)], &dw).unwrap();
        assert_eq!(p.n(), 1);
        assert!(dist(&p, |x| x.clone(), 500) <= 1e-2 / 6.0);
    }

    #[test]
    fn constant_from_a_slow_wave() {
        let p = polynomial_combo(1, &[b(2.5)], &b(1e-3)).unwrap();
        assert_eq!(p.n(), 1);
        assert!(dist(&p, |_| b(2.5), 500) < 1e-3);
    }

    #[test]
    fn cube_from_two_waves() {
        let target = |x: &BigReal| x.powi(3);
        let e1 = dist(&polynomial_combo(2, &[b(0.0), b(0.0), b(0.0), b(1.0)], &b(1e-2)).unwrap(), target, 500);
        let e2 = dist(&polynomial_combo(2, &[b(0.0), b(0.0), b(0.0), b(1.0)], &b(5e-3)).unwrap(), target, 500);
        assert!(e2 <= 0.6 * e1, "{e1} {e2}");
        assert!(e1 < 1e-2);
    }

    #[test]
    fn target_budget_is_exact() {
        let t = ResonantTarget {
            m0: 1,
            poly: vec![b(0.5), b(-1.0)],
            terms: vec![
                ResonantTerm { omega: b(4.0), amps: vec![b(1.0), b(0.5)], phases: vec![b(0.2), b(1.0)] },
                ResonantTerm { omega: b(9.0), amps: vec![b(0.3)], phases: vec![b(0.0)] },
            ],
        };
        let p = t.realize(&b(1e-4)).unwrap();
        assert_eq!(p.n(), t.wave_budget());
        assert_eq!(p.n(), 4);
        let d = sup_distance(|x: &BigReal| p.eval(x).map_err(|e| e.to_string()), |x: &BigReal| t.eval(x).map_err(|e| e.to_string()), 1000, B)
            .unwrap();
        assert!(d < 1e-2, "{d:?}");
    }
}
