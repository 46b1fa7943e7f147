use proptest::prelude::*;
use rand::Rng;
use xprlab_bignum::BigReal;
use xprlab_families::random::stream_rng;
use xprlab_fitlab::*;

fn b(x: f64) -> BigReal {
    BigReal::from_f64(x, FIT_BITS)
}

fn normalized(report: &ObstructionReport, targets: &[BigReal], n: usize) -> f64 {
    let scale = targets.iter().map(|t| t.abs().to_f64()).fold(0.0, f64::max);
    report.certificate.residual.abs().to_f64() / scale.powi(2 * n as i32 + 1)
}

#[test]
fn sign_pattern_cannot_be_fit() {
    let targets: Vec<BigReal> = [0.5, 0.5, 0.5, -0.5, 0.5].iter().map(|&v| b(v)).collect();
    let r = progression_fit_obstruction(1, &b(0.1), &b(0.2), &targets, &b(1e-3), 64, 3).unwrap();
    assert!(!r.certificate.pass);
    assert_eq!(r.fit.verdict, Verdict::FloorDetected, "{:?}", r.fit.restart_residuals);
    assert!(r.fit.max_residual > 1e-2);
}

#[test]
fn member_values_fit_and_certify() {
    let xs: Vec<BigReal> = (0..5).map(|k| b(0.1) + b(0.2) * k as f64).collect();
    let targets: Vec<BigReal> = xs.iter().map(|x| (x * 3.1 + 0.4).sin().unwrap() * 0.9).collect();
    let r = progression_fit_obstruction(1, &b(0.1), &b(0.2), &targets, &b(1e-6), 64, 4).unwrap();
    assert!(r.certificate.pass, "{:?}", r.certificate.residual);
    assert_eq!(r.fit.verdict, Verdict::Achieved);
}

#[test]
fn random_targets_for_two_waves() {
    for seed in 0..3 {
        let mut rng = stream_rng(900 + seed, 0);
        let targets: Vec<BigReal> = (0..9).map(|_| b(rng.gen_range(-1.0..1.0))).collect();
        let r = progression_fit_obstruction(2, &b(0.0), &b(0.125), &targets, &b(1e-3), 64, seed).unwrap();
        assert!(!r.certificate.pass);
        assert!(normalized(&r, &targets, 2) > 1e-3);
        assert_eq!(r.fit.verdict, Verdict::FloorDetected, "{:?}", r.fit.restart_residuals);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn failing_certificates_leave_a_floor(vals in prop::collection::vec(-1.0f64..1.0, 5), seed in 0u64..1000) {
        let targets: Vec<BigReal> = vals.iter().map(|&v| b(v)).collect();
        let r = progression_fit_obstruction(1, &b(0.05), &b(0.2), &targets, &b(1e-4), 16, seed).unwrap();
        if normalized(&r, &targets, 1) > 1e-3 {
            prop_assert!(r.fit.max_residual.signum() > 0);
        }
    }

    #[test]
    fn reports_are_reproducible(vals in prop::collection::vec(-1.0f64..1.0, 4), seed in 0u64..1000) {
        let xs: Vec<BigReal> = (0..4).map(|k| b(0.1 + 0.25 * k as f64)).collect();
        let ys: Vec<BigReal> = vals.iter().map(|&v| b(v)).collect();
        let mut inst = FitInstance::new(FamilySpec::H2 { n: 1 }, xs, ys, b(1e-3));
        inst.restarts = 8;
        let r = fit_family(&inst, seed).unwrap();
        if r.verdict == Verdict::Achieved {
            prop_assert!(r.max_residual < 1e-3);
        }
        prop_assert_eq!(r, fit_family(&inst, seed).unwrap());
    }
}
