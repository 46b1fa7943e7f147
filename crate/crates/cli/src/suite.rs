//! The ten acceptance criteria, each a self-contained randomized battery.

use std::time::Instant;

use rand::Rng;
use serde::Serialize;
use xprlab_bignum::{BigComplex, BigReal};
use xprlab_certify::{
    constraint_grid_size, det_certificate, entropy_bound, exp_poly_certificate, find_monochromatic_ap, hankel_certificate, n_vdw_bound, Coloring,
    EntropyBound,
};
use xprlab_families::random::{complex_poly, distinct_points, sine_sum, stream_rng};
use xprlab_families::{sample_complex, FamilyParams, PolyExpAlgParams, SampleGrid, Sigma};
use xprlab_fitlab::{fit_family, FamilySpec, FitInstance, Verdict, FIT_BITS};
use xprlab_kronecker::{residuals, shatter, solve_orbit, DiophantineInstance, KroneckerError, NotFound, ShatterInstance, Sign};
use xprlab_limits::{
    derivative_bound_check, polynomial_combo, recover_coefficients, resonance_combo, sup_distance, synthesize, RecoveredRoot, RecoveryInstance, Root,
};
use xprlab_netlab::{
    branched_certificate, build_universal_sin_arcsin, eval_network, mult_via_sines, random_branched_network, validate_single_transcendental,
    LayerCheck, FIG1_PARAMS,
};

#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub id: usize,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
    pub limit_seconds: f64,
}

impl Criterion {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {} {}: {} [{:.2}s of {}s]",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.title,
            self.detail,
            self.seconds,
            self.limit_seconds
        )
    }
}

type Check = Result<(bool, String), String>;

const TITLES: [(&str, f64); 10] = [
    ("determinant certificate", 30.0),
    ("exponential identity", 10.0),
    ("Kronecker fitting", 60.0),
    ("shattering", 60.0),
    ("resonance limits", 20.0),
    ("coefficient recovery", 10.0),
    ("derivative bound", 10.0),
    ("van der Waerden machinery", 120.0),
    ("G1 fitting", 300.0),
    ("networks", 10.0),
];

pub const CRITERIA: usize = TITLES.len();

/// Runs the listed criteria (all when `only` is empty) in order.
pub fn run_criteria(seed: u64, only: &[usize]) -> Vec<Criterion> {
    (1..=CRITERIA).filter(|id| only.is_empty() || only.contains(id)).map(|id| run_criterion(id, seed)).collect()
}

pub fn run_criterion(id: usize, seed: u64) -> Criterion {
    assert!((1..=CRITERIA).contains(&id), "criteria are numbered 1..={CRITERIA}");
    let (title, limit) = TITLES[id - 1];
    let rng = |trial: u64| stream_rng(seed, (id as u64) << 32 | trial);
    let start = Instant::now();
    let result = match id {
        1 => determinant(rng),
        2 => exponential(rng),
        3 => kronecker(rng),
        4 => shattering(),
        5 => resonance(),
        6 => recovery(rng),
        7 => derivative(rng),
        8 => van_der_waerden(rng),
        9 => g1_fitting(rng, seed),
        _ => networks(rng),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (ok, detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
    let pass = ok && seconds < limit;
    let detail = if ok && !pass { format!("{detail}; over the time limit") } else { detail };
    Criterion { id, title, pass, detail, seconds, limit_seconds: limit }
}

fn big(v: &[f64], bits: u32) -> Vec<BigReal> {
    v.iter().map(|&x| BigReal::from_f64(x, bits)).collect()
}

fn s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

type Stream = rand_chacha::ChaCha8Rng;

fn determinant(rng: impl Fn(u64) -> Stream) -> Check {
    const B: u32 = 256;
    let tol = BigReal::one(B).ldexp(-128);
    let mut passed = 0;
    let mut worst = BigReal::zero(B);
    for trial in 0..200 {
        let mut r = rng(trial);
        let n = 1 + (trial % 4) as usize;
        let p = FamilyParams::H2(sine_sum(&mut r, n, 2.0, 20.0, B));
        let al = big(&distinct_points(&mut r, 2 * n + 1, 0.0, 0.5, 1e-3), B);
        let be = big(&distinct_points(&mut r, 2 * n + 1, 0.0, 0.5, 1e-3), B);
        let c = det_certificate(|x: &BigReal| p.evaluate(x), &BigReal::zero(B), &al, &be, n, Some(tol.clone())).map_err(s)?;
        worst = worst.max(&c.residual);
        passed += usize::from(c.pass);
    }
    let g = |x: &BigReal| x.exp().map(|e| x.powi(3) + e * 0.1);
    let grids = 100;
    let mut failed = 0;
    for trial in 0..grids {
        let mut r = rng(1000 + trial);
        let n = 1 + (trial % 2) as usize;
        let al = big(&distinct_points(&mut r, 2 * n + 1, 0.0, 1.0, 1e-2), B);
        let be = big(&distinct_points(&mut r, 2 * n + 1, 0.0, 1.0, 1e-2), B);
        failed += usize::from(!det_certificate(g, &BigReal::zero(B), &al, &be, n, None).map_err(s)?.pass);
    }
    Ok((
        passed == 200 && failed * 100 >= 95 * grids as usize,
        format!("{passed}/200 sine sums pass (worst normalized residual {}); control fails {failed}/{grids} grids (N ≤ 2)", worst.to_short(3)),
    ))
}

fn exponential(rng: impl Fn(u64) -> Stream) -> Check {
    const B: u32 = 256;
    let h = BigReal::from_f64(0.1, B);
    let (mut passed, mut caught) = (0, 0);
    for trial in 0..100 {
        let mut r = rng(trial);
        let d = (trial % 7) as usize;
        let poly = complex_poly(&mut r, d, B);
        let run = |poly: Vec<BigComplex>| -> Result<bool, String> {
            let p = FamilyParams::H3(PolyExpAlgParams::exp_of(poly));
            let grid = sample_complex(&p, &BigReal::zero(B), &h, d + 2).map_err(s)?;
            Ok(exp_poly_certificate(&grid, d, None).map_err(s)?.pass)
        };
        passed += usize::from(run(poly.clone())?);
        let mut over = poly;
        over.push(BigComplex::from_f64(r.gen_range(0.3..1.0), r.gen_range(-1.0..1.0), B));
        caught += usize::from(!run(over)?);
    }
    Ok((passed == 100 && caught == 100, format!("{passed}/100 pass at their degree; {caught}/100 degree-overflow controls fail")))
}

fn kronecker(rng: impl Fn(u64) -> Stream) -> Check {
    const B: u32 = 256;
    let b = |v: f64| BigReal::from_f64(v, B);
    let points = vec![b(1.0), BigReal::from_i64(2, B).sqrt().map_err(s)?];
    let points_hi = vec![BigReal::one(512), BigReal::from_i64(2, 512).sqrt().map_err(s)?];
    let mut solved = 0;
    let mut largest: f64 = 0.0;
    for trial in 0..20 {
        let mut r = rng(trial);
        let theta = vec![b(r.gen_range(0.0..std::f64::consts::TAU)), b(r.gen_range(0.0..std::f64::consts::TAU))];
        let inst = DiophantineInstance::new(points.clone(), theta.clone(), b(0.05)).map_err(s)?.with_budget(b(1e8));
        let Ok(sol) = solve_orbit(&inst) else { continue };
        let hi = DiophantineInstance::new(points_hi.clone(), theta.iter().map(|t| t.to_bits(512)).collect(), BigReal::from_f64(0.05, 512)).map_err(s)?;
        let again = residuals(&hi, &sol.omega.to_bits(512)).map_err(s)?;
        if sol.verified && sol.omega <= 1e8 && again.iter().all(|r| *r < 0.05) {
            solved += 1;
            largest = largest.max(sol.omega.to_f64());
        }
    }
    let half_pi = BigReal::pi(B).ldexp(-1);
    let control = DiophantineInstance::new(vec![b(0.25), b(0.75)], vec![half_pi.clone(), half_pi + 1.0], b(1e-3)).map_err(s)?;
    let witness = matches!(solve_orbit(&control), Err(KroneckerError::NotFound(NotFound::Subtorus { .. })));
    Ok((
        solved == 20 && witness,
        format!("{solved}/20 solved and re-verified at 512 bits (largest ω {largest:.3e}); dependent control {}", if witness { "gives a subtorus witness" } else { "was not rejected" }),
    ))
}

fn shattering() -> Check {
    const B: u32 = 256;
    let b = |v: f64| BigReal::from_f64(v, B);
    let pts: Vec<BigReal> = [2, 3, 5].iter().map(|&p| BigReal::from_i64(p, B).sqrt().map(|r| r.ldexp(-2))).collect::<Result<_, _>>().map_err(s)?;
    let mut achieved = 0;
    for mask in 0..8u32 {
        let pattern: Vec<Sign> = (0..3).map(|k| if mask >> k & 1 == 1 { Sign::Minus } else { Sign::Plus }).collect();
        let Ok(p) = shatter(&ShatterInstance { points: pts.clone(), pattern: pattern.clone(), delta: b(0.1) }) else { continue };
        let margins: Vec<BigReal> = pts.iter().zip(&pattern).map(|(x, sg)| p.evaluate(x).map(|v| v * f64::from(sg.value()))).collect::<Result<_, _>>().map_err(s)?;
        achieved += usize::from(margins.iter().all(|m| *m > 0.1));
    }
    let pattern = Sign::parse("+++-+").unwrap();
    let prog: Vec<BigReal> = (0..5).map(|k| b(0.1) + b(0.2) * f64::from(k)).collect();
    let refused = matches!(shatter(&ShatterInstance { points: prog, pattern: pattern.clone(), delta: b(0.1) }), Err(KroneckerError::NotFound(_)));
    let targets: Vec<BigReal> = pattern.iter().map(|sg| b(0.5 * f64::from(sg.value()))).collect();
    let cert = hankel_certificate(&targets, 1, None).map_err(s)?;
    Ok((
        achieved == 8 && refused && !cert.pass,
        format!(
            "{achieved}/8 patterns at margin 0.1; +++-+ on a progression {}; its targets give det residual {}",
            if refused { "is NotFound" } else { "was not refused" },
            cert.residual.to_short(3)
        ),
    ))
}

fn resonance() -> Check {
    const B: u32 = 256;
    let b = |v: f64| BigReal::from_f64(v, B);
    let (omega, h) = (b(3.0), b(0.4));
    let err = |m: u32, dw: f64| -> Result<f64, String> {
        let p = resonance_combo(&omega, &h, m, &b(dw)).map_err(s)?;
        let target = |x: &BigReal| (&omega * x + &h).sin().map(|v| v * x.powi(m as i32));
        Ok(sup_distance(|x: &BigReal| p.eval(x).map_err(s), |x: &BigReal| target(x).map_err(s), 2000, B).map_err(s)?.to_f64())
    };
    let mut ok = true;
    let mut ratios = Vec::new();
    for m in [1, 2] {
        for dw in [1e-2, 1e-3, 1e-4] {
            let ratio = err(m, dw / 2.0)? / err(m, dw)?;
            ok &= (0.4..=0.6).contains(&ratio);
            ratios.push(format!("{ratio:.3}"));
        }
    }
    let mut poly_ok = true;
    for dw in [1e-2, 1e-3, 1e-4] {
        let p = polynomial_combo(1, &[b(0.0), b(1.0)], &b(dw)).map_err(s)?;
        let e = sup_distance(|x: &BigReal| p.eval(x).map_err(s), |x: &BigReal| Ok::<_, String>(x.clone()), 2000, B).map_err(s)?;
        poly_ok &= e.to_f64() <= dw / 6.0 + 1e-12;
    }
    Ok((
        ok && poly_ok,
        format!("halving ratios m=1,2: [{}]; polynomial combo for x within Δω/6: {poly_ok}", ratios.join(", ")),
    ))
}

fn recovery(rng: impl Fn(u64) -> Stream) -> Check {
    const B: u32 = 256;
    let tol = BigReal::one(B).ldexp(-128);
    let mut worst = BigReal::zero(B);
    for trial in 0..50 {
        let mut r = rng(trial);
        let roots = separated_roots(&mut r, B);
        let truth: Vec<RecoveredRoot> = roots
            .iter()
            .map(|(z, m, real)| {
                let len = if *real { 2 * m } else { *m };
                let b = (0..len).map(|_| BigComplex::from_f64(r.gen_range(-1.0..1.0), if *real { 0.0 } else { r.gen_range(-1.0..1.0) }, B)).collect();
                RecoveredRoot { z: z.clone(), multiplicity: *m, real: *real, b }
            })
            .collect();
        let n: usize = roots.iter().map(|r| r.1).sum();
        let len = 2 * n + 4;
        let samples = SampleGrid::new(BigReal::zero(B), BigReal::one(B), len - 1, synthesize(&truth, len, B)).map_err(s)?;
        let inst = RecoveryInstance { samples, roots: roots.iter().map(|(z, m, _)| Root { z: z.clone(), multiplicity: *m }).collect() };
        let got = recover_coefficients(&inst).map_err(s)?;
        for (g, t) in got.roots.iter().zip(&truth) {
            for (x, y) in g.b.iter().zip(&t.b) {
                worst = worst.max(&(x - y).abs());
            }
        }
    }
    Ok((worst < tol, format!("50 round trips, largest coefficient error {}", worst.to_short(3))))
}

/// Unit-circle roots with total multiplicity at most 3 and arguments at least 0.1 apart.
fn separated_roots(r: &mut Stream, bits: u32) -> Vec<(BigComplex, usize, bool)> {
    loop {
        let mut budget = r.gen_range(1..=3usize);
        let mut args: Vec<f64> = Vec::new();
        let mut roots = Vec::new();
        if r.gen_bool(0.4) {
            let m = r.gen_range(1..=budget);
            let sign = if r.gen_bool(0.5) { 1.0 } else { -1.0 };
            roots.push((BigComplex::from_f64(sign, 0.0, bits), m, true));
            args.push(if sign > 0.0 { 0.0 } else { std::f64::consts::PI });
            budget -= m;
        }
        while budget > 0 {
            let m = r.gen_range(1..=budget);
            let a = r.gen_range(0.1..std::f64::consts::PI - 0.1) * if r.gen_bool(0.5) { 1.0 } else { -1.0 };
            args.push(a.abs());
            roots.push((BigComplex::from_polar(&BigReal::one(bits), &BigReal::from_f64(a, bits)).expect("finite"), m, false));
            budget -= m;
        }
        if args.iter().enumerate().all(|(i, x)| args[i + 1..].iter().all(|y| (x - y).abs() >= 0.1)) {
            return roots;
        }
    }
}

fn derivative(rng: impl Fn(u64) -> Stream) -> Check {
    let omega = BigReal::from_f64(20.0, 128);
    let mut held = 0;
    for trial in 0..100 {
        let mut r = rng(trial);
        let waves = r.gen_range(1..=3);
        let p = sine_sum(&mut r, waves, 2.0, 20.0, 128);
        let order = r.gen_range(0..=3);
        held += usize::from(derivative_bound_check(&p, order, Some(&omega), 2001).map_err(s)?.pass);
    }
    Ok((held == 100, format!("inequality holds for {held}/100 members (Ω = 20, n ≤ 3)")))
}

fn van_der_waerden(rng: impl Fn(u64) -> Stream) -> Check {
    const B: u32 = 256;
    let every_nine = (0u32..512).all(|code| {
        let c = Coloring { colors: (0..9).map(|i| (code >> i & 1) as usize).collect() };
        find_monochromatic_ap(&c, 3).is_some_and(|ap| {
            let colors: Vec<usize> = ap.positions().map(|i| c.colors[i - 1]).collect();
            colors.iter().all(|&x| x == colors[0])
        })
    });
    let stored = Coloring::from_letters("RRBBRRBB").map_err(s)?;
    let stored_avoids = find_monochromatic_ap(&stored, 3).is_none();
    let table = constraint_grid_size(2, 1, 1, 1) == 14 && constraint_grid_size(1, 1, 0, 0) == 6;
    let mut certified = 0;
    let mut sized = 0;
    for trial in 0..50 {
        let mut r = rng(trial);
        let bn = random_branched_network(&mut r, B);
        let a = r.gen_range(0.0..0.4);
        let hi = r.gen_range(a + 0.2..1.0);
        let single = bn.net.hidden_count() <= 6 && validate_single_transcendental(&bn.net).map_err(s)? == LayerCheck::Ok;
        let c = branched_certificate(&bn, &BigReal::from_f64(a, B), &BigReal::from_f64(hi, B), None).map_err(s)?;
        certified += usize::from(single && c.pass);
        let w = n_vdw_bound(bn.s, bn.p).map_err(s)?;
        let m = c.metadata["grid"]["m"].as_u64().unwrap_or(0);
        let used = c.metadata["samples_used"].as_u64().unwrap_or(0) as usize;
        sized += usize::from(m + 1 == w && used == bn.sub.samples_needed() && used <= bn.s);
    }
    Ok((
        every_nine && stored_avoids && table && certified == 50 && sized == 50,
        format!(
            "all 512 colorings of 9 hold a mono 3-AP: {every_nine}; RRBBRRBB avoids: {stored_avoids}; {certified}/50 networks certified, {sized}/50 grids sized W(s, p)"
        ),
    ))
}

fn g1_fitting(rng: impl Fn(u64) -> Stream, seed: u64) -> Check {
    let b = |v: f64| BigReal::from_f64(v, FIT_BITS);
    let dataset = |r: &mut Stream, k: usize| {
        let mut xs = distinct_points(r, k, 0.0, 1.0, 0.02);
        xs.sort_by(f64::total_cmp);
        let ys: Vec<BigReal> = (0..k).map(|_| b(r.gen_range(-1.0..1.0))).collect();
        (big(&xs, FIT_BITS), ys)
    };
    let achieved = |spec: FamilySpec, stream: u64| -> Result<usize, String> {
        let mut hits = 0;
        for i in 0..10 {
            let (xs, ys) = dataset(&mut rng(stream + i), 5);
            let r = fit_family(&FitInstance::new(spec.clone(), xs, ys, b(1e-3)), seed.wrapping_add(i)).map_err(s)?;
            hits += usize::from(r.verdict == Verdict::Achieved && r.restarts_used <= 64);
        }
        Ok(hits)
    };
    let sigmoid = achieved(FamilySpec::HSigma { sigma: Sigma::Sigmoid }, 0)?;
    let nested = achieved(FamilySpec::H5 { n: 1 }, 100)?;
    let mut r = rng(200);
    let xs: Vec<BigReal> = (0..9).map(|k| b(f64::from(k) / 8.0)).collect();
    let ys: Vec<BigReal> = (0..9).map(|_| b(r.gen_range(-1.0..1.0))).collect();
    let quadratic = Sigma::Polynomial(vec![b(0.2), b(-0.7), b(1.3)]);
    let control = fit_family(&FitInstance::new(FamilySpec::HSigma { sigma: quadratic }, xs, ys, b(1e-3)), seed).map_err(s)?;
    let floor = control.verdict == Verdict::FloorDetected && control.max_residual > 1e-2;
    Ok((
        sigmoid >= 9 && nested >= 9 && floor,
        format!(
            "sigmoid {sigmoid}/10, sine-of-sine {nested}/10 achieved at ε = 1e-3; quadratic σ control {:?} with floor {}",
            control.verdict,
            control.max_residual.to_short(3)
        ),
    ))
}

fn networks(rng: impl Fn(u64) -> Stream) -> Check {
    const B: u32 = 128;
    let b = |v: f64| BigReal::from_f64(v, B);
    let mut r = rng(0);
    let weights: Vec<BigReal> = (0..FIG1_PARAMS).map(|_| b(r.gen_range(-0.5..0.5))).collect();
    let net = build_universal_sin_arcsin(&weights).map_err(s)?;
    let evaluates = [0.0, 0.3, 0.7, 1.0].iter().all(|&x| eval_network(&net, &b(x)).is_ok_and(|(y, _)| y.is_finite()));
    let stacked = matches!(validate_single_transcendental(&net).map_err(s)?, LayerCheck::Violation { .. });
    let worst = |eps: f64| -> Result<f64, String> {
        let mut m: f64 = 0.0;
        for i in 0..20 {
            for j in 0..20 {
                let (z1, z2) = (-1.0 + 2.0 * f64::from(i) / 19.0, -1.0 + 2.0 * f64::from(j) / 19.0);
                let p = mult_via_sines(&b(z1), &b(z2), &b(eps)).map_err(s)?;
                m = m.max((p.value - b(z1) * b(z2)).abs().to_f64());
            }
        }
        Ok(m)
    };
    let ratio = worst(5e-3)? / worst(1e-2)?;
    let bound = entropy_bound(4, 32, &b(1.0), &b(2f64.powi(-7))).map_err(s)?;
    Ok((
        evaluates && stacked && (0.15..=0.35).contains(&ratio) && bound == EntropyBound::Finite(18),
        format!("universal graph evaluates: {evaluates}, rejected as multi-layer: {stacked}; product error ratio {ratio:.3}; entropy bound {bound:?}"),
    ))
}
