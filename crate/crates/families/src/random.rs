//! Seeded generators for family members.
//!
//! Every random draw in the workspace goes through [`stream_rng`]: one master
//! seed, one independent ChaCha stream per trial or restart.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xprlab_bignum::{BigComplex, BigReal};

use crate::{SineSumParams, Wave};

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn uniform(rng: &mut impl Rng, lo: f64, hi: f64, bits: u32) -> BigReal {
    BigReal::from_f64(rng.gen_range(lo..hi), bits)
}

/// Sine sum with `|c| ≤ amp`, `|ω| ≤ freq`, `h ∈ [0, 2π)`.
pub fn sine_sum(rng: &mut impl Rng, n: usize, amp: f64, freq: f64, bits: u32) -> SineSumParams {
    let waves = (0..n)
        .map(|_| {
            Wave::new(
                uniform(rng, -amp, amp, bits),
                uniform(rng, -freq, freq, bits),
                uniform(rng, 0.0, std::f64::consts::TAU, bits),
            )
        })
        .collect();
    SineSumParams { waves }
}

/// Complex polynomial of exact degree `deg` with coefficients in the unit box.
pub fn complex_poly(rng: &mut impl Rng, deg: usize, bits: u32) -> Vec<BigComplex> {
    (0..=deg)
        .map(|k| {
            let mut re = rng.gen_range(-1.0..1.0);
            if k == deg && re == 0.0 {
                re = 0.5;
            }
            BigComplex::new(BigReal::from_f64(re, bits), uniform(rng, -1.0, 1.0, bits))
        })
        .collect()
}

/// `n` distinct sorted reals in `[lo, hi)` with pairwise gap at least `gap`.
pub fn distinct_points(rng: &mut impl Rng, n: usize, lo: f64, hi: f64, gap: f64) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..hi)).collect();
        v.sort_by(f64::total_cmp);
        if v.windows(2).all(|w| w[1] - w[0] >= gap) {
            return v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = stream_rng(7, 3).gen();
        let b: u64 = stream_rng(7, 3).gen();
        let c: u64 = stream_rng(7, 4).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn generated_members_respect_ranges() {
        let mut rng = stream_rng(1, 0);
        let p = sine_sum(&mut rng, 4, 2.0, 10.0, 128);
        assert_eq!(p.n(), 4);
        assert!(p.waves.iter().all(|w| w.c.abs() <= 2.0 && w.omega.abs() <= 10.0));
        let pts = distinct_points(&mut rng, 5, 0.0, 1.0, 0.05);
        assert!(pts.windows(2).all(|w| w[1] - w[0] >= 0.05));
    }
}
