//! Multi-start least-squares fitting of the families to finite data.
//!
//! A `floor-detected` verdict is evidence of infeasibility, not a proof: the
//! parameters that interpolate may need frequencies beyond any search budget.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use xprlab_bignum::BigReal;
use xprlab_certify::{hankel_certificate, Certificate};
use xprlab_families::{random::stream_rng, FamilyParams};

mod lm;
mod model;
mod seed;

pub use model::FamilySpec;

/// Working precision of the polish and of every reported residual.
pub const FIT_BITS: u32 = 128;
const BATCH: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum FitError {
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error(transparent)]
    Big(#[from] xprlab_bignum::BigError),
    #[error(transparent)]
    Family(#[from] xprlab_families::FamilyError),
    #[error(transparent)]
    Certify(#[from] xprlab_certify::CertifyError),
}

pub type Result<T> = std::result::Result<T, FitError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitInstance {
    pub family: FamilySpec,
    pub xs: Vec<BigReal>,
    pub ys: Vec<BigReal>,
    pub eps: BigReal,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_iterations")]
    pub max_iter: usize,
}

fn default_restarts() -> usize {
    64
}

fn default_iterations() -> usize {
    300
}

impl FitInstance {
    pub fn new(family: FamilySpec, xs: Vec<BigReal>, ys: Vec<BigReal>, eps: BigReal) -> Self {
        FitInstance { family, xs, ys, eps, restarts: default_restarts(), max_iter: default_iterations() }
    }

    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        if self.xs.is_empty() || self.xs.len() != self.ys.len() {
            return Err(FitError::Invalid("need as many targets as points, at least one".into()));
        }
        if self.xs.iter().any(|x| *x < 0.0 || *x > 1.0) {
            return Err(FitError::Invalid("points must lie in [0, 1]".into()));
        }
        if self.xs.iter().enumerate().any(|(i, a)| self.xs[i + 1..].contains(a)) {
            return Err(FitError::Invalid("points must be distinct".into()));
        }
        if self.eps.signum() <= 0 {
            return Err(FitError::Invalid("ε must be positive".into()));
        }
        if self.restarts == 0 {
            return Err(FitError::Invalid("need at least one restart".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Achieved,
    FloorDetected,
    BudgetExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartKind {
    Random,
    Orbit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub params: FamilyParams,
    pub residuals: Vec<BigReal>,
    pub max_residual: BigReal,
    pub restarts_used: usize,
    pub verdict: Verdict,
    /// How the winning restart was started.
    pub start: StartKind,
    /// Max residual of every restart, in restart order.
    pub restart_residuals: Vec<f64>,
}

struct Candidate {
    theta: Vec<BigReal>,
    residual: BigReal,
    start: StartKind,
}

fn measure(spec: &FamilySpec, theta: &[BigReal], xs: &[BigReal], ys: &[BigReal]) -> Option<(FamilyParams, Vec<BigReal>, BigReal)> {
    let p = spec.to_params(theta, FIT_BITS).ok()?;
    let r: Vec<BigReal> = xs.iter().zip(ys).map(|(x, y)| p.evaluate(x).map(|g| (g - y).abs())).collect::<std::result::Result<_, _>>().ok()?;
    let m = r.iter().fold(BigReal::zero(FIT_BITS), |m, v| m.max(v));
    Some((p, r, m))
}

fn restart(inst: &FitInstance, seed: u64, index: usize, xs: &[BigReal], ys: &[BigReal]) -> Option<Candidate> {
    let spec = &inst.family;
    let mut rng = stream_rng(seed, index as u64);
    let eps = inst.eps.to_f64();
    if index % 2 == 1 && seed::has_lattice(spec) {
        if let Some(theta) = seed::lattice_start(spec, &mut rng, xs, ys, &inst.eps) {
            if let Some((_, _, residual)) = measure(spec, &theta, xs, ys) {
                return Some(Candidate { theta, residual, start: StartKind::Orbit });
            }
        }
    }
    let xf: Vec<f64> = xs.iter().map(BigReal::to_f64).collect();
    let yf: Vec<f64> = ys.iter().map(BigReal::to_f64).collect();
    let t0 = seed::random_start(spec, &mut rng, &xf, &yf);
    let mut out = lm::levenberg_marquardt(spec, t0, &xf, &yf, inst.max_iter, eps * 0.1)?;
    // close to an interpolant but crawling along a narrow valley
    if out.max_residual >= eps && out.max_residual < (100.0 * eps).max(1e-4) {
        out = lm::levenberg_marquardt(spec, out.theta, &xf, &yf, 10 * inst.max_iter, eps * 0.1)?;
    }
    let mut theta: Vec<BigReal> = out.theta.iter().map(|v| BigReal::from_f64(*v, FIT_BITS)).collect();
    let (_, _, mut residual) = measure(spec, &theta, xs, ys)?;
    // machine precision floor: finish at full working precision
    if residual >= inst.eps && out.max_residual < 1e-6 {
        if let Some(p) = lm::levenberg_marquardt(spec, theta.clone(), xs, ys, 30, eps * 0.1) {
            if let Some((_, _, r)) = measure(spec, &p.theta, xs, ys) {
                if r < residual {
                    (theta, residual) = (p.theta, r);
                }
            }
        }
    }
    Some(Candidate { theta, residual, start: StartKind::Random })
}

/// Best of up to `restarts` descents, run in parallel batches and stopped
/// after the first batch that meets `ε`; identical for identical seeds.
pub fn fit_family(inst: &FitInstance, seed: u64) -> Result<FitReport> {
    inst.validate()?;
    let xs: Vec<BigReal> = inst.xs.iter().map(|x| x.to_bits(FIT_BITS)).collect();
    let ys: Vec<BigReal> = inst.ys.iter().map(|y| y.to_bits(FIT_BITS)).collect();
    let mut all: Vec<Option<Candidate>> = Vec::with_capacity(inst.restarts);
    let mut start = 0;
    while start < inst.restarts {
        let end = (start + BATCH).min(inst.restarts);
        let batch: Vec<Option<Candidate>> = (start..end).into_par_iter().map(|i| restart(inst, seed, i, &xs, &ys)).collect();
        let done = batch.iter().flatten().any(|c| c.residual < inst.eps);
        all.extend(batch);
        start = end;
        if done {
            break;
        }
    }
    let restart_residuals: Vec<f64> = all.iter().map(|c| c.as_ref().map_or(f64::INFINITY, |c| c.residual.to_f64())).collect();
    let best = all
        .into_iter()
        .flatten()
        .reduce(|a, b| if b.residual < a.residual { b } else { a })
        .ok_or_else(|| FitError::Invalid("no restart produced finite parameters".into()))?;
    let (params, residuals, max_residual) =
        measure(&inst.family, &best.theta, &xs, &ys).ok_or_else(|| FitError::Invalid("best parameters do not evaluate".into()))?;
    let verdict = verdict(&restart_residuals, &max_residual, &inst.eps);
    Ok(FitReport { params, residuals, max_residual, restarts_used: restart_residuals.len(), verdict, start: best.start, restart_residuals })
}

fn verdict(all: &[f64], best: &BigReal, eps: &BigReal) -> Verdict {
    if best < eps {
        return Verdict::Achieved;
    }
    let mut sorted = all.to_vec();
    sorted.sort_by(f64::total_cmp);
    let floor = sorted.len() >= 5 && *best > eps.clone() * 10.0 && sorted[4] <= 2.0 * sorted[0];
    if floor { Verdict::FloorDetected } else { Verdict::BudgetExhausted }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObstructionReport {
    pub fit: FitReport,
    /// Determinant certificate of the targets themselves.
    pub certificate: Certificate,
}

/// Fits `N` sine waves to targets on `u + kv`, `k = 0..=4N`, and checks the
/// targets against the determinant constraint every such sum satisfies there.
pub fn progression_fit_obstruction(
    n: usize,
    u: &BigReal,
    v: &BigReal,
    targets: &[BigReal],
    eps: &BigReal,
    restarts: usize,
    seed: u64,
) -> Result<ObstructionReport> {
    if targets.len() != 4 * n + 1 {
        return Err(FitError::Invalid(format!("need {} targets on the progression", 4 * n + 1)));
    }
    let xs: Vec<BigReal> = (0..targets.len()).map(|k| u + v * (k as f64)).collect();
    let mut inst = FitInstance::new(FamilySpec::H2 { n }, xs, targets.to_vec(), eps.clone());
    inst.restarts = restarts;
    let fit = fit_family(&inst, seed)?;
    let certificate = hankel_certificate(targets, n, None)?;
    Ok(ObstructionReport { fit, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: f64) -> BigReal {
        BigReal::from_f64(x, FIT_BITS)
    }

    #[test]
    fn realizable_sine_sum() {
        let xs: Vec<BigReal> = (0..6).map(|k| b(k as f64 / 5.0)).collect();
        let ys: Vec<BigReal> = xs.iter().map(|x| (x * 2.5 + 0.7).sin().unwrap() * 1.2).collect();
        let mut inst = FitInstance::new(FamilySpec::H2 { n: 1 }, xs, ys, b(1e-8));
        inst.restarts = 16;
        let r = fit_family(&inst, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Achieved);
        assert!(r.max_residual < 1e-8);
    }

    #[test]
    fn same_seed_same_report() {
        let xs: Vec<BigReal> = (0..5).map(|k| b(0.1 + 0.17 * k as f64)).collect();
        let ys: Vec<BigReal> = [0.3, -0.2, 0.9, 0.1, -0.7].iter().map(|&v| b(v)).collect();
        let mut inst = FitInstance::new(FamilySpec::H2 { n: 1 }, xs, ys, b(1e-3));
        inst.restarts = 8;
        assert_eq!(fit_family(&inst, 5).unwrap(), fit_family(&inst, 5).unwrap());
    }

    #[test]
    fn verdict_rules() {
        let eps = b(1e-3);
        assert_eq!(verdict(&[0.5; 5], &b(1e-4), &eps), Verdict::Achieved);
        assert_eq!(verdict(&[0.1, 0.12, 0.15, 0.18, 0.19], &b(0.1), &eps), Verdict::FloorDetected);
        assert_eq!(verdict(&[0.1, 0.12, 0.15, 0.18, 0.5], &b(0.1), &eps), Verdict::BudgetExhausted);
        assert_eq!(verdict(&[0.1, 0.12], &b(0.1), &eps), Verdict::BudgetExhausted);
    }

    #[test]
    fn rejects_bad_instances() {
        let inst = FitInstance::new(FamilySpec::H1, vec![b(0.2), b(0.2)], vec![b(0.0), b(1.0)], b(1e-3));
        assert!(fit_family(&inst, 0).is_err());
        let inst = FitInstance::new(FamilySpec::H1, vec![b(1.2)], vec![b(0.0)], b(1e-3));
        assert!(fit_family(&inst, 0).is_err());
    }
}
