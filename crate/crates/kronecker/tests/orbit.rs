use rand::{Rng, SeedableRng};
use xprlab_bignum::BigReal;
use xprlab_kronecker::*;

const B: u32 = 256;

fn b(x: f64) -> BigReal {
    BigReal::from_f64(x, B)
}

fn sqrt2() -> BigReal {
    BigReal::from_i64(2, B).sqrt().unwrap()
}

/// Independent oracle: plain f64 scan of `ω ∈ [0, hi]` at the given step.
fn dense_oracle(xs: &[f64], ts: &[f64], eps: f64, hi: f64, step: f64) -> Option<f64> {
    let tau = std::f64::consts::TAU;
    let mut w = 0.0;
    while w <= hi {
        let ok = xs.iter().zip(ts).all(|(x, t)| {
            let r = (w * x - t).rem_euclid(tau);
            r.min(tau - r) < eps
        });
        if ok {
            return Some(w);
        }
        w += step;
    }
    None
}

#[test]
fn one_and_root_two_quarter_turns() {
    let half_pi = BigReal::pi(B).ldexp(-1);
    let inst = DiophantineInstance::new(vec![b(1.0), sqrt2()], vec![half_pi.clone(), half_pi], b(0.05)).unwrap();
    let s = solve_orbit(&inst).unwrap();
    assert!(s.omega <= 1e4);
    assert!(s.verified);
    let t = std::f64::consts::FRAC_PI_2;
    let oracle = dense_oracle(&[1.0, 2f64.sqrt()], &[t, t], 0.05, 1e4, 1e-3).expect("oracle finds a frequency");
    // both land on the same feasible window
    assert!((s.omega.to_f64() - oracle).abs() < 0.1, "{} vs {oracle}", s.omega.to_f64());
}

#[test]
fn lattice_and_grid_agree_on_solvability() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..6 {
        let ts = [rng.gen_range(0.0..6.28), rng.gen_range(0.0..6.28)];
        let theta: Vec<BigReal> = ts.iter().map(|&t| b(t)).collect();
        let eps = b(0.08);
        let budget = b(400.0);
        let inst = DiophantineInstance::new(vec![b(1.0), sqrt2()], theta, eps).unwrap().with_budget(budget.clone());
        let lattice = solve_orbit(&inst);
        // the grid can miss windows narrower than its step, so compare with a safety margin
        let strict = DiophantineInstance { eps: b(0.04), ..inst.clone() };
        let grid_strict = grid_scan(&strict, &b(0.0), &budget, u64::MAX).unwrap();
        let grid = grid_scan(&inst, &b(0.0), &budget, u64::MAX).unwrap();
        if grid_strict.is_some() {
            assert!(lattice.is_ok());
        }
        if let Ok(sol) = &lattice {
            if let Some(g) = &grid {
                // same feasible window: the lattice picks a point inside it, the grid its first sample
                assert!(sol.omega <= g.clone() + 0.16);
            }
        }
        if lattice.is_err() {
            assert!(grid.is_none());
        }
    }
}

#[test]
fn criterion_style_random_targets() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let theta = vec![b(rng.gen_range(0.0..6.28)), b(rng.gen_range(0.0..6.28))];
        let inst = DiophantineInstance::new(vec![b(1.0), sqrt2()], theta, b(0.05)).unwrap();
        let s = solve_orbit(&inst).unwrap();
        assert!(s.verified);
        assert!(s.residuals.iter().all(|r| *r < 0.05));
    }
}

#[test]
fn dependent_quarter_points_unreachable() {
    let half_pi = BigReal::pi(B).ldexp(-1);
    let inst =
        DiophantineInstance::new(vec![b(0.25), b(0.75)], vec![half_pi.clone(), half_pi + 1.0], b(1e-3)).unwrap();
    assert!(matches!(solve_orbit(&inst), Err(KroneckerError::NotFound(NotFound::Subtorus { .. }))));
    // one period of the orbit is ω ∈ [0, 8π]; a dense scan confirms
    let t = std::f64::consts::FRAC_PI_2;
    assert!(dense_oracle(&[0.25, 0.75], &[t, t + 1.0], 1e-3, 8.0 * std::f64::consts::PI, 1e-5).is_none());
}

#[test]
fn single_sine_fit_on_root_two() {
    let f = fit_single_sine(&[b(1.0), sqrt2()], &[b(0.5), b(-0.3)], &b(0.05)).unwrap();
    assert!(f.c >= 1.5);
    for (x, y) in [(1.0, 0.5), (2f64.sqrt(), -0.3)] {
        let v = f.c.to_f64() * (f.omega.to_f64() * x).sin();
        assert!((v - y).abs() < 0.05);
    }
}

#[test]
fn single_sine_fit_on_dependent_points() {
    let r = fit_single_sine(&[b(0.2), b(0.4)], &[b(0.9), b(0.1)], &b(1e-4));
    assert!(matches!(r, Err(KroneckerError::NotFound(_))), "{r:?}");
    // every ω in one period of sin(0.2ω) misses
    let c = 1.9;
    let mut w: f64 = 0.0;
    let period = std::f64::consts::TAU / 0.2;
    while w < period {
        let ok = (c * (0.2 * w).sin() - 0.9).abs() < 1e-4 && (c * (0.4 * w).sin() - 0.1).abs() < 1e-4;
        assert!(!ok);
        w += 1e-5;
    }
}

#[test]
fn independence_examples() {
    assert_eq!(
        rational_independence_check(&[b(1.0), b(2.0)], 5).unwrap(),
        Independence::Relation { lambda: vec![2, -1] }
    );
    assert_eq!(
        rational_independence_check(&[b(1.0), sqrt2()], 1_000_000).unwrap(),
        Independence::IndependentUpTo { bound: 1_000_000 }
    );
}

#[test]
fn all_sign_patterns_on_three_points() {
    let pts: Vec<BigReal> = [2, 3, 5].iter().map(|&p| BigReal::from_i64(p, B).sqrt().unwrap().ldexp(-2)).collect();
    for mask in 0..8u32 {
        let pattern: Vec<Sign> = (0..3).map(|k| if mask >> k & 1 == 1 { Sign::Minus } else { Sign::Plus }).collect();
        let inst = ShatterInstance { points: pts.clone(), pattern: pattern.clone(), delta: b(0.1) };
        let p = shatter(&inst).unwrap_or_else(|e| panic!("{pattern:?}: {e}"));
        for (x, s) in pts.iter().zip(&pattern) {
            let v = p.evaluate(x).unwrap() * (s.value() as f64);
            assert!(v > 0.1);
        }
    }
}
