use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use xprlab_bignum::{reduce_mod_2pi, BigReal};

use crate::independence::{rational_independence_check, Independence};
use crate::phase::PhaseSystem;
use crate::{KroneckerError, NotFound, Result};

pub const DEFAULT_BUDGET: f64 = 1e8;

fn default_budget() -> BigReal {
    BigReal::from_f64(DEFAULT_BUDGET, xprlab_bignum::default_bits())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiophantineInstance {
    pub points: Vec<BigReal>,
    pub theta: Vec<BigReal>,
    pub eps: BigReal,
    #[serde(default = "default_budget")]
    pub omega_max: BigReal,
}

impl DiophantineInstance {
    pub fn new(points: Vec<BigReal>, theta: Vec<BigReal>, eps: BigReal) -> Result<Self> {
        let bits = eps.bits();
        let inst = DiophantineInstance { points, theta, eps, omega_max: BigReal::from_f64(DEFAULT_BUDGET, bits) };
        inst.validate()?;
        Ok(inst)
    }

    pub fn with_budget(mut self, omega_max: BigReal) -> Self {
        self.omega_max = omega_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.points.len();
        if n == 0 {
            return Err(KroneckerError::Invalid("no points".into()));
        }
        if self.theta.len() != n {
            return Err(KroneckerError::Invalid(format!("{n} points but {} targets", self.theta.len())));
        }
        if !(self.eps.is_finite() && self.eps.signum() > 0) {
            return Err(KroneckerError::Invalid("tolerance must be positive".into()));
        }
        if !(self.omega_max.is_finite() && self.omega_max.signum() >= 0) {
            return Err(KroneckerError::Invalid("frequency budget must be non-negative".into()));
        }
        if self.points.iter().chain(&self.theta).any(|v| !v.is_finite()) {
            return Err(KroneckerError::Invalid("non-finite input".into()));
        }
        for i in 0..n {
            for j in i + 1..n {
                if self.points[i] == self.points[j] {
                    return Err(KroneckerError::Invalid(format!("points {i} and {j} coincide")));
                }
            }
        }
        Ok(())
    }

    pub fn bits(&self) -> u32 {
        self.points.iter().chain(&self.theta).map(BigReal::bits).chain([self.eps.bits()]).max().unwrap()
    }

    fn at_bits(&self, bits: u32) -> Self {
        DiophantineInstance {
            points: self.points.iter().map(|v| v.to_bits(bits)).collect(),
            theta: self.theta.iter().map(|v| v.to_bits(bits)).collect(),
            eps: self.eps.to_bits(bits),
            omega_max: self.omega_max.to_bits(bits),
        }
    }
}

/// Distance from `a` to `b` on the circle `R / 2πZ`.
pub fn circle_distance(a: &BigReal, b: &BigReal) -> Result<BigReal> {
    let r = reduce_mod_2pi(&(a - b))?;
    let other = BigReal::two_pi(r.bits()) - &r;
    Ok(r.min(&other))
}

/// Circle distances `d(ω·x_k, θ_k)`.
pub fn residuals(inst: &DiophantineInstance, omega: &BigReal) -> Result<Vec<BigReal>> {
    inst.points.iter().zip(&inst.theta).map(|(x, t)| circle_distance(&(omega * x), t)).collect()
}

fn satisfies(inst: &DiophantineInstance, omega: &BigReal) -> Result<bool> {
    Ok(residuals(inst, omega)?.iter().all(|r| *r < inst.eps))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Trivial,
    Lattice,
    GridScan,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitSolution {
    pub omega: BigReal,
    pub residuals: Vec<BigReal>,
    /// Post-condition re-checked at twice the working precision.
    pub verified: bool,
    pub method: Method,
}

#[derive(Debug, Clone)]
pub struct OrbitOptions {
    /// First search radius; each level multiplies it by 4 up to the budget.
    pub start: f64,
    /// Lattice points examined per level before falling back to the grid scan.
    pub enumeration_cap: usize,
    /// Total grid-scan steps allowed.
    pub grid_limit: u64,
    /// Coefficient bound for the subtorus test.
    pub relation_bound: u64,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions { start: 64.0, enumeration_cap: 20_000, grid_limit: 200_000_000, relation_bound: 16 }
    }
}

pub fn solve_orbit(inst: &DiophantineInstance) -> Result<OrbitSolution> {
    solve_orbit_with(inst, &OrbitOptions::default())
}

/// Smallest non-negative `ω ≤ Ω_max` found with every circle residual below `ε`.
///
/// Each level searches `[0, Ω]` exhaustively on the lattice of winding
/// numbers; a level whose enumeration overflows is covered by a grid scan.
pub fn solve_orbit_with(inst: &DiophantineInstance, opts: &OrbitOptions) -> Result<OrbitSolution> {
    inst.validate()?;
    let bits = inst.bits();
    let inst = inst.at_bits(bits);
    let theta: Vec<BigReal> = inst.theta.iter().map(reduce_mod_2pi).collect::<std::result::Result<_, _>>()?;
    let work = DiophantineInstance { theta, ..inst.clone() };

    let zero = BigReal::zero(bits);
    if work.eps >= BigReal::pi(bits) || satisfies(&work, &zero)? {
        return finish(&inst, zero, Method::Trivial);
    }
    for (index, (x, t)) in work.points.iter().zip(&work.theta).enumerate() {
        if x.is_zero() {
            let distance = circle_distance(&zero, t)?;
            if distance >= work.eps {
                return Err(KroneckerError::NotFound(NotFound::ZeroPoint { index, distance }));
            }
        }
    }
    let active: Vec<usize> = (0..work.points.len()).filter(|&k| !work.points[k].is_zero()).collect();
    if let Some(w) = subtorus_witness(&work, &active, opts.relation_bound)? {
        return Err(KroneckerError::NotFound(w));
    }

    let mut lo = BigReal::zero(bits);
    let mut level = BigReal::from_f64(opts.start, bits).min(&work.omega_max);
    let mut grid_left = opts.grid_limit;
    loop {
        let found = match lattice_level(&work, &active, &level, opts.enumeration_cap)? {
            Some(Some(omega)) => Some((omega, Method::Lattice)),
            Some(None) => None,
            None => {
                let (hit, used) = grid_scan_counted(&work, &lo, &level, grid_left)?;
                grid_left = grid_left.saturating_sub(used);
                hit.map(|w| (w, Method::GridScan))
            }
        };
        if let Some((omega, method)) = found {
            return finish(&inst, omega, method);
        }
        if level >= work.omega_max || grid_left == 0 {
            return Err(KroneckerError::NotFound(NotFound::Budget { omega_max: work.omega_max.clone(), scanned_to: level }));
        }
        lo = level.clone();
        level = (&level * 4.0).min(&work.omega_max);
    }
}

fn finish(inst: &DiophantineInstance, omega: BigReal, method: Method) -> Result<OrbitSolution> {
    let residuals = residuals(inst, &omega)?;
    if residuals.iter().any(|r| *r >= inst.eps) {
        return Err(KroneckerError::Inconclusive("candidate failed the post-condition".into()));
    }
    let hi = inst.at_bits(2 * inst.bits());
    let verified = satisfies(&hi, &omega.to_bits(2 * inst.bits()))?;
    Ok(OrbitSolution { omega, residuals, verified, method })
}

/// `Some(best)` when the level was searched exhaustively, `None` when the enumeration cap was hit.
fn lattice_level(
    inst: &DiophantineInstance,
    active: &[usize],
    level: &BigReal,
    cap: usize,
) -> Result<Option<Option<BigReal>>> {
    let bits = inst.bits();
    let half = level.ldexp(-1);
    let sys = PhaseSystem {
        a: active.iter().map(|&k| vec![inst.points[k].clone()]).collect(),
        center: vec![half.clone()],
        half_width: vec![half],
        theta: active.iter().map(|&k| inst.theta[k].clone()).collect(),
        eps: inst.eps.clone(),
    };
    let search = sys.search(None, cap)?;
    if !search.complete {
        return Ok(None);
    }
    let two_pi = BigReal::two_pi(bits);
    let mut best: Option<BigReal> = None;
    for cand in &search.candidates {
        let mut lo = BigReal::zero(bits);
        let mut hi = level.clone();
        for (j, &k) in active.iter().enumerate() {
            let x = &inst.points[k];
            let mid = &inst.theta[k] + &cand.n[j] * &two_pi;
            let mut a = (&mid - &inst.eps) / x;
            let mut b = (&mid + &inst.eps) / x;
            if x.is_negative() {
                std::mem::swap(&mut a, &mut b);
            }
            lo = lo.max(&a);
            hi = hi.min(&b);
        }
        if lo >= hi {
            continue;
        }
        let omega = &lo + (&hi - &lo).ldexp(-3);
        if best.as_ref().map_or(true, |b| omega < *b) && satisfies(inst, &omega)? {
            best = Some(omega);
        }
    }
    Ok(Some(best))
}

fn subtorus_witness(inst: &DiophantineInstance, active: &[usize], bound: u64) -> Result<Option<NotFound>> {
    if active.len() < 2 {
        return Ok(None);
    }
    let pts: Vec<BigReal> = active.iter().map(|&k| inst.points[k].clone()).collect();
    let lambda = match rational_independence_check(&pts, bound) {
        Ok(Independence::Relation { lambda }) => lambda,
        Ok(Independence::IndependentUpTo { .. }) | Err(KroneckerError::Inconclusive(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let bits = inst.bits();
    let phase: BigReal = active.iter().zip(&lambda).map(|(&k, &l)| &inst.theta[k] * BigReal::from_i64(l, bits)).sum();
    let defect = circle_distance(&phase, &BigReal::zero(bits))?;
    let allowance = &inst.eps * BigReal::from_i64(lambda.iter().map(|l| l.abs()).sum(), bits);
    let mut full = vec![0; inst.points.len()];
    for (&k, &l) in active.iter().zip(&lambda) {
        full[k] = l;
    }
    Ok((defect >= allowance).then_some(NotFound::Subtorus { lambda: full, defect, allowance }))
}

const CHUNK: u64 = 1 << 15;

fn grid_scan_counted(inst: &DiophantineInstance, lo: &BigReal, hi: &BigReal, limit: u64) -> Result<(Option<BigReal>, u64)> {
    let max_x = inst.points.iter().map(|x| x.abs().to_f64()).fold(0.0, f64::max);
    if max_x == 0.0 {
        return Ok((None, 0));
    }
    let eps = inst.eps.to_f64();
    let step = eps / (std::f64::consts::TAU * max_x);
    let span = (hi - lo).to_f64().max(0.0);
    let total = ((span / step).ceil() as u64 + 1).min(limit);
    let xs: Vec<f64> = inst.points.iter().map(BigReal::to_f64).collect();
    let ts: Vec<f64> = inst.theta.iter().map(BigReal::to_f64).collect();
    let base = lo.to_f64();
    let bits = inst.bits();
    let chunks = total.div_ceil(CHUNK);
    let near = |w: f64| {
        xs.iter().zip(&ts).all(|(x, t)| {
            let r = (w * x - t).rem_euclid(std::f64::consts::TAU);
            let d = r.min(std::f64::consts::TAU - r);
            d < eps * (1.0 + 1e-9) + 1e-12 * (w * x).abs()
        })
    };
    let hit = (0..chunks).into_par_iter().find_map_first(|c| {
        let end = ((c + 1) * CHUNK).min(total);
        (c * CHUNK..end).find_map(|i| {
            let w = base + i as f64 * step;
            if !near(w) {
                return None;
            }
            let omega = lo + BigReal::from_f64(i as f64 * step, bits);
            match satisfies(inst, &omega) {
                Ok(true) if omega <= *hi => Some(omega),
                _ => None,
            }
        })
    });
    Ok((hit, total))
}

/// First grid point `lo + i·ε/(2π max|x|)` in `[lo, hi]` meeting the tolerance,
/// scanning at most `limit` points.
pub fn grid_scan(inst: &DiophantineInstance, lo: &BigReal, hi: &BigReal, limit: u64) -> Result<Option<BigReal>> {
    inst.validate()?;
    let theta = inst.theta.iter().map(reduce_mod_2pi).collect::<std::result::Result<_, _>>()?;
    let work = DiophantineInstance { theta, ..inst.clone() };
    Ok(grid_scan_counted(&work, lo, hi, limit)?.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SineFit {
    pub c: BigReal,
    pub omega: BigReal,
    /// `|c·sin(ω x_k) − y_k|`.
    pub residuals: Vec<BigReal>,
    pub verified: bool,
}

/// `c·sin(ω x_k) ≈ y_k` with `c = max|y| + 1` and `θ_k = arcsin(y_k / c)`.
pub fn fit_single_sine(points: &[BigReal], targets: &[BigReal], eps: &BigReal) -> Result<SineFit> {
    fit_single_sine_with(points, targets, eps, None, &OrbitOptions::default())
}

pub fn fit_single_sine_with(
    points: &[BigReal],
    targets: &[BigReal],
    eps: &BigReal,
    omega_max: Option<&BigReal>,
    opts: &OrbitOptions,
) -> Result<SineFit> {
    if points.len() != targets.len() {
        return Err(KroneckerError::Invalid("points and targets differ in length".into()));
    }
    if eps.signum() <= 0 {
        return Err(KroneckerError::Invalid("tolerance must be positive".into()));
    }
    let bits = points.iter().chain(targets).map(BigReal::bits).chain([eps.bits()]).max().unwrap_or(eps.bits());
    let c = targets.iter().fold(BigReal::zero(bits), |m, y| m.max(&y.abs())) + 1.0;
    let theta = targets
        .iter()
        .map(|y| (y / &c).asin().and_then(|t| reduce_mod_2pi(&t)))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut inst = DiophantineInstance::new(points.to_vec(), theta, eps / &c)?;
    if let Some(b) = omega_max {
        inst = inst.with_budget(b.clone());
    }
    let sol = solve_orbit_with(&inst, opts)?;
    let residuals = points
        .iter()
        .zip(targets)
        .map(|(x, y)| Ok((&c * (&sol.omega * x).sin()? - y).abs()))
        .collect::<Result<Vec<_>>>()?;
    if residuals.iter().any(|r| r >= eps) {
        return Err(KroneckerError::Inconclusive("sine fit failed its post-check".into()));
    }
    Ok(SineFit { c, omega: sol.omega, residuals, verified: sol.verified })
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: u32 = 256;

    fn b(x: f64) -> BigReal {
        BigReal::from_f64(x, B)
    }

    #[test]
    fn single_point_quarter_turn() {
        let half_pi = BigReal::pi(B).ldexp(-1);
        let inst = DiophantineInstance::new(vec![b(1.0)], vec![half_pi.clone()], b(1e-6)).unwrap();
        let s = solve_orbit(&inst).unwrap();
        assert!((s.omega - half_pi).abs() < 1e-6);
        assert!(s.verified);
    }

    #[test]
    fn zero_targets_are_trivial() {
        let inst = DiophantineInstance::new(vec![b(0.3), b(0.7)], vec![b(0.0), b(0.0)], b(0.01)).unwrap();
        let s = solve_orbit(&inst).unwrap();
        assert!(s.omega.is_zero());
        assert_eq!(s.method, Method::Trivial);
    }

    #[test]
    fn dependent_points_have_a_witness() {
        let half_pi = BigReal::pi(B).ldexp(-1);
        let inst =
            DiophantineInstance::new(vec![b(0.25), b(0.75)], vec![half_pi.clone(), half_pi + 1.0], b(1e-3)).unwrap();
        match solve_orbit(&inst) {
            Err(KroneckerError::NotFound(NotFound::Subtorus { lambda, .. })) => assert_eq!(lambda, vec![3, -1]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_point_cannot_move() {
        let inst = DiophantineInstance::new(vec![b(0.0), b(0.5)], vec![b(1.0), b(1.0)], b(0.1)).unwrap();
        assert!(matches!(solve_orbit(&inst), Err(KroneckerError::NotFound(NotFound::ZeroPoint { index: 0, .. }))));
    }

    #[test]
    fn huge_tolerance_is_trivial() {
        let inst = DiophantineInstance::new(vec![b(0.5)], vec![b(3.0)], b(4.0)).unwrap();
        assert!(solve_orbit(&inst).unwrap().omega.is_zero());
    }

    #[test]
    fn coincident_points_rejected() {
        assert!(DiophantineInstance::new(vec![b(0.5), b(0.5)], vec![b(0.0), b(1.0)], b(0.1)).is_err());
    }

    #[test]
    fn all_zero_targets_fit_trivially() {
        let f = fit_single_sine(&[b(0.2), b(0.9)], &[b(0.0), b(0.0)], &b(1e-3)).unwrap();
        assert_eq!(f.c, 1.0);
        assert!(f.omega.is_zero());
    }
}
