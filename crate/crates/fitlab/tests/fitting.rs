use rand::Rng;
use xprlab_bignum::BigReal;
use xprlab_families::{random::stream_rng, Sigma};
use xprlab_fitlab::*;

fn b(x: f64) -> BigReal {
    BigReal::from_f64(x, FIT_BITS)
}

fn dataset(seed: u64, k: usize) -> (Vec<BigReal>, Vec<BigReal>) {
    let mut rng = stream_rng(seed, 0);
    let mut xs: Vec<f64> = xprlab_families::random::distinct_points(&mut rng, k, 0.0, 1.0, 0.02);
    xs.sort_by(f64::total_cmp);
    let ys = (0..k).map(|_| b(rng.gen_range(-1.0..1.0))).collect();
    (xs.into_iter().map(b).collect(), ys)
}

fn achieved(spec: FamilySpec) -> usize {
    (0..10)
        .filter(|&s| {
            let (xs, ys) = dataset(100 + s, 5);
            let r = fit_family(&FitInstance::new(spec.clone(), xs, ys, b(1e-3)), s).unwrap();
            r.verdict == Verdict::Achieved
        })
        .count()
}

#[test]
fn sigmoid_sines_fit_generic_data() {
    assert!(achieved(FamilySpec::HSigma { sigma: Sigma::Sigmoid }) >= 9);
}

#[test]
fn sines_of_sines_fit_generic_data() {
    assert!(achieved(FamilySpec::H5 { n: 1 }) >= 9);
}

fn poly_sigma() -> Sigma {
    Sigma::Polynomial(vec![b(0.2), b(-0.7), b(1.3)])
}

#[test]
fn quadratic_sigma_shows_a_floor() {
    let xs: Vec<BigReal> = (0..9).map(|k| b(k as f64 / 8.0)).collect();
    let mut rng = stream_rng(77, 0);
    let ys: Vec<BigReal> = (0..9).map(|_| b(rng.gen_range(-1.0..1.0))).collect();
    let r = fit_family(&FitInstance::new(FamilySpec::HSigma { sigma: poly_sigma() }, xs, ys, b(1e-3)), 7).unwrap();
    assert_eq!(r.verdict, Verdict::FloorDetected, "{:?}", r.restart_residuals);
    assert!(r.max_residual > 1e-2);
}

fn random_theta(spec: &FamilySpec, rng: &mut impl Rng) -> Vec<f64> {
    let wave = |rng: &mut dyn rand::RngCore| {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        [sign * rng.gen_range(0.5..1.5), rng.gen_range(0.5..8.0), rng.gen_range(-3.0..3.0)]
    };
    match spec {
        FamilySpec::H1 => vec![rng.gen_range(0.5..1.5), rng.gen_range(0.5..8.0)],
        FamilySpec::H2 { n } => (0..*n).flat_map(|_| wave(rng)).collect(),
        FamilySpec::HSigma { .. } => vec![rng.gen_range(0.5..1.5), rng.gen_range(0.5..8.0), rng.gen_range(-1.2..1.2), rng.gen_range(-3.0..3.0)],
        FamilySpec::H5 { n } => {
            let mut t = vec![rng.gen_range(0.5..1.5), rng.gen_range(-3.0..3.0)];
            t.extend((0..*n).flat_map(|_| wave(rng)));
            t
        }
    }
}

fn recovers(spec: FamilySpec) {
    for seed in 0..20 {
        let mut rng = stream_rng(500 + seed, 1);
        let theta = random_theta(&spec, &mut rng);
        let member = spec.to_params(&theta, FIT_BITS).unwrap();
        let k = spec.param_count();
        let mut xs = xprlab_families::random::distinct_points(&mut rng, k, 0.0, 1.0, 0.02);
        xs.sort_by(f64::total_cmp);
        let xs: Vec<BigReal> = xs.into_iter().map(b).collect();
        let ys: Vec<BigReal> = xs.iter().map(|x| member.evaluate(x).unwrap()).collect();
        let r = fit_family(&FitInstance::new(spec.clone(), xs, ys, b(1e-6)), seed).unwrap();
        assert_eq!(r.verdict, Verdict::Achieved, "{spec:?} seed {seed}: {:?}", r.restart_residuals);
        assert!(r.restarts_used <= 64);
    }
}

#[test]
fn recovers_single_sines() {
    recovers(FamilySpec::H1);
}

#[test]
fn recovers_sine_sums() {
    recovers(FamilySpec::H2 { n: 1 });
    recovers(FamilySpec::H2 { n: 2 });
}

#[test]
fn recovers_sigma_sines() {
    for sigma in [Sigma::Sigmoid, Sigma::Tanh, Sigma::Gaussian, poly_sigma()] {
        recovers(FamilySpec::HSigma { sigma });
    }
}

#[test]
fn recovers_sines_of_sines() {
    recovers(FamilySpec::H5 { n: 1 });
    recovers(FamilySpec::H5 { n: 2 });
}
