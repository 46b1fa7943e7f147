//! Starting points: random draws, and Kronecker-orbit constructions that
//! already meet the tolerance.

use rand::Rng;
use xprlab_bignum::BigReal;
use xprlab_families::Sigma;
use xprlab_kronecker::{solve_orbit_with, DiophantineInstance, OrbitOptions};

use crate::lm::solve;
use crate::model::FamilySpec;

fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    let f = (rng.gen_range(lo.ln()..hi.ln())).exp();
    if rng.gen_bool(0.5) { f } else { -f }
}

/// Indices of the linear amplitude parameters.
fn linear_slots(spec: &FamilySpec) -> Vec<usize> {
    match spec {
        FamilySpec::H1 | FamilySpec::HSigma { .. } => vec![0],
        FamilySpec::H2 { n } => (0..*n).map(|k| 3 * k).collect(),
        FamilySpec::H5 { .. } => vec![0, 1],
    }
}

/// Frequencies log-uniform in `[10⁻², 10³]`, phases uniform, then the linear
/// amplitudes by ridge least squares.
pub(crate) fn random_start(spec: &FamilySpec, rng: &mut impl Rng, xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let tau = std::f64::consts::TAU;
    let mut t = match spec {
        FamilySpec::H1 => vec![1.0, log_uniform(rng, 1e-2, 1e3)],
        FamilySpec::H2 { n } => (0..*n).flat_map(|_| [1.0, log_uniform(rng, 1e-2, 1e3), rng.gen_range(0.0..tau)]).collect(),
        FamilySpec::HSigma { .. } => {
            vec![1.0, log_uniform(rng, 1e-2, 1e3), rng.gen_range(-1.5..1.5), rng.gen_range(0.0..tau)]
        }
        FamilySpec::H5 { n } => {
            let mut v = vec![1.0, 0.0];
            for _ in 0..*n {
                v.extend([rng.gen_range(-3.0..3.0), log_uniform(rng, 1e-2, 1e3), rng.gen_range(0.0..tau)]);
            }
            v
        }
    };
    let slots = linear_slots(spec);
    let Ok((_, jac)) = spec.residuals(&t, xs, ys) else { return t };
    let p = slots.len();
    let mut a = vec![vec![0.0; p]; p];
    let mut b = vec![0.0; p];
    for (row, y) in jac.iter().zip(ys) {
        for i in 0..p {
            b[i] += row[slots[i]] * y;
            for k in 0..p {
                a[i][k] += row[slots[i]] * row[slots[k]];
            }
        }
    }
    for (i, row) in a.iter_mut().enumerate() {
        row[i] += 1e-9;
    }
    if let Some(amps) = solve(a, b) {
        for (s, v) in slots.iter().zip(amps) {
            t[*s] = v.clamp(-1e3, 1e3);
        }
    }
    t
}

/// Amplitude a random margin above the largest target.
fn widen(m: BigReal, rng: &mut impl Rng) -> BigReal {
    let m = if m.is_zero() { BigReal::one(m.bits()) } else { m };
    m * (1.0 + rng.gen_range(0.05..0.6))
}

fn branch_targets(rng: &mut impl Rng, values: &[BigReal], c: &BigReal) -> Option<Vec<BigReal>> {
    let pi = BigReal::pi(c.bits());
    values
        .iter()
        .map(|v| {
            let a = (v / c).asin().ok()?;
            Some(if rng.gen_bool(0.5) { a } else { &pi - a })
        })
        .collect()
}

/// Phase offsets `ω·p_k ≡ θ_k` with `ω` from the orbit solver.
fn orbit(points: Vec<BigReal>, theta: Vec<BigReal>, eps: BigReal) -> Option<BigReal> {
    let inst = DiophantineInstance::new(points, theta, eps).ok()?.with_budget(BigReal::from_f64(1e22, 128));
    let opts = OrbitOptions { grid_limit: 1 << 22, ..OrbitOptions::default() };
    solve_orbit_with(&inst, &opts).ok().filter(|s| s.verified).map(|s| s.omega)
}

/// Parameters within `ε` of every target, built on a dense orbit; `None` when
/// the draw does not apply or the orbit solver gives up.
///
/// * `H1`: `ω·x_k ≡ θ_k`.
/// * `Hσ`: random `b`, then `ω·(σ(bx_k) − σ(bx_0)) ≡ θ_k − θ_0` and `h` absorbs the rest.
/// * `H5`: one inner wave vanishing at `x_0`, `h = y_0`, inner amplitude on the orbit.
pub(crate) fn lattice_start(spec: &FamilySpec, rng: &mut impl Rng, xs: &[BigReal], ys: &[BigReal], eps: &BigReal) -> Option<Vec<BigReal>> {
    let bits = xs[0].bits();
    let spread = |vals: &[BigReal]| vals.iter().fold(BigReal::zero(bits), |m, v| m.max(&v.abs()));
    match spec {
        FamilySpec::H1 => {
            let c = widen(spread(ys), rng);
            let theta = branch_targets(rng, ys, &c)?;
            let tol = eps / &c * 0.45;
            let omega = orbit(xs.to_vec(), theta, tol)?;
            Some(vec![c, omega])
        }
        FamilySpec::HSigma { sigma } => {
            let b = rng.gen_range(0.3..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let b = BigReal::from_f64(b, bits);
            let z: Vec<BigReal> = xs.iter().map(|x| sigma.eval(&(&b * x))).collect::<Result<_, _>>().ok()?;
            let c = widen(spread(ys), rng);
            let theta = branch_targets(rng, ys, &c)?;
            let tol = eps / &c * 0.45;
            let points = z[1..].iter().map(|v| v - &z[0]).collect();
            let shifted = theta[1..].iter().map(|t| t - &theta[0]).collect();
            let omega = orbit(points, shifted, tol)?;
            let h = &theta[0] - &omega * &z[0];
            Some(vec![c, omega, b.asin().ok()?, h])
        }
        FamilySpec::H5 { n } => {
            let w = BigReal::from_f64(rng.gen_range(0.5..1.5), bits);
            let p = -(&w * &xs[0]);
            let u: Vec<BigReal> = xs[1..].iter().map(|x| (&w * x + &p).sin()).collect::<Result<_, _>>().ok()?;
            let off: Vec<BigReal> = ys[1..].iter().map(|y| y - &ys[0]).collect();
            let c = widen(spread(&off), rng);
            let theta = branch_targets(rng, &off, &c)?;
            let tol = eps / &c * 0.45;
            let a = orbit(u, theta, tol)?;
            let mut t = vec![c, ys[0].clone(), a, w, p];
            for _ in 1..*n {
                t.extend([BigReal::zero(bits), BigReal::one(bits), BigReal::zero(bits)]);
            }
            Some(t)
        }
        FamilySpec::H2 { .. } => None,
    }
}

/// Whether orbit constructions are worth trying for this family.
pub(crate) fn has_lattice(spec: &FamilySpec) -> bool {
    match spec {
        FamilySpec::H1 | FamilySpec::H5 { .. } => true,
        FamilySpec::HSigma { sigma } => !matches!(sigma, Sigma::Polynomial(c) if c.len() <= 1),
        FamilySpec::H2 { .. } => false,
    }
}

