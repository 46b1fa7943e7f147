use std::fmt::Display;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use xprlab_bignum::BigReal;
use xprlab_families::SampleGrid;

use crate::det::hankel_certificate;
use crate::exppoly::exp_poly_certificate_real;
use crate::{sample_with, CertKind, Certificate, CertifyError, Result};

/// Colors of `1..=n`, stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub colors: Vec<usize>,
}

impl Coloring {
    pub fn new(colors: Vec<usize>) -> Result<Self> {
        if colors.is_empty() {
            return Err(CertifyError::Invalid("empty coloring".into()));
        }
        Ok(Coloring { colors })
    }

    /// One symbol per position, e.g. `"RRBB"`; symbols are numbered by first appearance.
    pub fn from_letters(s: &str) -> Result<Self> {
        let mut seen: Vec<char> = Vec::new();
        let colors = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match seen.iter().position(|&x| x == c) {
                Some(i) => i,
                None => {
                    seen.push(c);
                    seen.len() - 1
                }
            })
            .collect();
        Coloring::new(colors)
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }
}

/// Positions `start, start+step, …` (1-based), `length` of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progression {
    pub start: usize,
    pub step: usize,
    pub length: usize,
}

impl Progression {
    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.length).map(move |i| self.start + i * self.step)
    }
}

/// First monochromatic `s`-term progression, smallest step first, then smallest start.
pub fn find_monochromatic_ap(coloring: &Coloring, s: usize) -> Option<Progression> {
    let n = coloring.len();
    let c = &coloring.colors;
    if s <= 1 {
        return (n >= 1).then_some(Progression { start: 1, step: 1, length: s });
    }
    for step in 1..=(n - 1) / (s - 1) {
        for start in 0..n - (s - 1) * step {
            let color = c[start];
            if (1..s).all(|i| c[start + i * step] == color) {
                return Some(Progression { start: start + 1, step, length: s });
            }
        }
    }
    None
}

/// A `p`-coloring of `1..=n` with no monochromatic `s`-term progression, if one exists.
///
/// Exhaustive over all `p^n` colorings; refuses above `2^26` of them.
pub fn avoiding_coloring(n: usize, s: usize, p: usize) -> Result<Option<Coloring>> {
    let total = (p as f64).powi(n as i32);
    if p == 0 || total > (1u64 << 26) as f64 {
        return Err(CertifyError::Budget(format!("{p}^{n} colorings is too many to enumerate")));
    }
    let total = total as u64;
    let decode = |mut code: u64| {
        let colors = (0..n)
            .map(|_| {
                let c = (code % p as u64) as usize;
                code /= p as u64;
                c
            })
            .collect();
        Coloring { colors }
    };
    Ok((0..total).into_par_iter().map(decode).find_first(|c| find_monochromatic_ap(c, s).is_none()))
}

/// van der Waerden numbers `W(s, p)` known exactly.
pub fn n_vdw_bound(s: usize, p: usize) -> Result<u64> {
    if p == 0 {
        return Err(CertifyError::Invalid("need at least one color".into()));
    }
    Ok(match (s, p) {
        (0 | 1, _) => 1,
        (2, p) => p as u64 + 1,
        (s, 1) => s as u64,
        (3, 2) => 9,
        (3, 3) => 27,
        (3, 4) => 76,
        (4, 2) => 35,
        (4, 3) => 293,
        (5, 2) => 178,
        (6, 2) => 1132,
        _ => return Err(CertifyError::Budget(format!("W({s}, {p}) is not tabulated"))),
    })
}

/// Certifier run on the monochromatic sub-progression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubCertifier {
    /// Hankel determinant for sums of `n` sine waves; needs `4n+1` samples.
    Det { n: usize },
    /// Exponential identity of level `d`; needs `d+2` samples.
    ExpPoly { d: usize },
}

impl SubCertifier {
    pub fn samples_needed(&self) -> usize {
        match *self {
            SubCertifier::Det { n } => 4 * n + 1,
            SubCertifier::ExpPoly { d } => d + 2,
        }
    }
}

/// Samples `g` on `W(s, p)` equally spaced points of `[a, b]`, colors each point
/// by branch, and certifies `g` on a monochromatic `s`-term sub-progression.
#[allow(clippy::too_many_arguments)]
pub fn vdw_composite_certificate<E: Display>(
    g: impl Fn(&BigReal) -> std::result::Result<BigReal, E>,
    a: &BigReal,
    b: &BigReal,
    colorer: impl Fn(&BigReal) -> std::result::Result<usize, E>,
    sub: SubCertifier,
    s: usize,
    p: usize,
    tol: Option<BigReal>,
) -> Result<Certificate> {
    if s < sub.samples_needed() {
        return Err(CertifyError::Invalid(format!(
            "sub-progressions of length {s} are shorter than the {} samples the certifier needs",
            sub.samples_needed()
        )));
    }
    if b <= a {
        return Err(CertifyError::Invalid("need a < b".into()));
    }
    let w = n_vdw_bound(s, p)? as usize;
    let m = w - 1;
    let bits = a.bits().max(b.bits());
    let h = if m == 0 { b - a } else { (b - a) / BigReal::from_i64(m as i64, bits) };
    let xs: Vec<BigReal> = (0..=m).map(|i| a + &h * (i as f64)).collect();
    let colors = xs
        .iter()
        .map(|x| {
            let c = colorer(x).map_err(|e| CertifyError::Sample { x: x.to_short(20), message: e.to_string() })?;
            if c >= p {
                return Err(CertifyError::Invalid(format!("branch index {c} outside 0..{p}")));
            }
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;
    let coloring = Coloring { colors };
    let prog = find_monochromatic_ap(&coloring, s)
        .ok_or_else(|| CertifyError::Internal(format!("no monochromatic {s}-progression among {w} points")))?;
    let used = sub.samples_needed();
    let idx: Vec<usize> = prog.positions().take(used).map(|i| i - 1).collect();
    let values = idx.iter().map(|&i| sample_with(&g, &xs[i])).collect::<Result<Vec<_>>>()?;
    let inner = match sub {
        SubCertifier::Det { n } => hankel_certificate(&values, n, tol)?,
        SubCertifier::ExpPoly { d } => {
            let step = &h * (prog.step as f64);
            let grid = SampleGrid::new(xs[idx[0]].clone(), step, used - 1, values)
                .map_err(|e| CertifyError::Invalid(e.to_string()))?;
            exp_poly_certificate_real(&grid, d, tol)?
        }
    };
    Ok(Certificate::new(
        CertKind::VdwComposite,
        inner.residual.clone(),
        inner.tolerance.clone(),
        json!({
            "grid": { "a": a.to_short(20), "b": b.to_short(20), "m": m },
            "vdw": { "s": s, "p": p, "w": w },
            "progression": prog,
            "samples_used": used,
            "colors": coloring.colors,
            "sub": inner,
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    #[test]
    fn nine_points_example() {
        let c = Coloring::from_letters("RRBBRRBBR").unwrap();
        assert_eq!(find_monochromatic_ap(&c, 3), Some(Progression { start: 1, step: 4, length: 3 }));
        let c = Coloring::from_letters("RRBBRRBB").unwrap();
        assert_eq!(find_monochromatic_ap(&c, 3), None);
        let c = Coloring::from_letters("RRR").unwrap();
        assert_eq!(find_monochromatic_ap(&c, 3), Some(Progression { start: 1, step: 1, length: 3 }));
    }

    #[test]
    fn small_numbers_by_exhaustion() {
        // W(3,2) = 9: some coloring of 8 avoids, none of 9 does
        assert!(avoiding_coloring(8, 3, 2).unwrap().is_some());
        assert!(avoiding_coloring(9, 3, 2).unwrap().is_none());
        assert!(avoiding_coloring(2, 2, 2).unwrap().is_some());
        assert!(avoiding_coloring(3, 2, 2).unwrap().is_none());
        assert_eq!(n_vdw_bound(2, 2).unwrap(), 3);
        assert!(matches!(n_vdw_bound(7, 2), Err(CertifyError::Budget(_))));
    }

    #[test]
    fn one_branch_uses_the_grid_prefix() {
        let g = |x: &BigReal| x.exp();
        let col = |_: &BigReal| Ok(0usize);
        let a = BigReal::zero(256);
        let b = BigReal::one(256);
        let c = vdw_composite_certificate(g, &a, &b, col, SubCertifier::ExpPoly { d: 1 }, 3, 1, None).unwrap();
        assert!(c.pass);
        assert_eq!(c.metadata["progression"]["start"], 1);
        assert_eq!(c.metadata["progression"]["step"], 1);
    }

    #[test]
    fn relu_feeding_sine_across_the_kink() {
        // sin(3·relu(x − 0.37) + 0.4): constant left of the kink, a sine wave right of it
        let kink = BigReal::from_f64(0.37, 256);
        let g = |x: &BigReal| {
            let z = (x - &kink).max(&BigReal::zero(256));
            (z * 3.0 + 0.4).sin()
        };
        let col = |x: &BigReal| Ok::<_, xprlab_bignum::BigError>(usize::from(*x > kink));
        let a = BigReal::zero(256);
        let b = BigReal::one(256);
        let c = vdw_composite_certificate(g, &a, &b, col, SubCertifier::Det { n: 1 }, 5, 2, None).unwrap();
        assert!(c.pass, "{:?}", c.residual);
        assert_eq!(c.metadata["vdw"]["w"], 178);
        // the straddling control fails: five equally spaced points across the kink
        let vals: Vec<BigReal> = (0..5).map(|k| g(&BigReal::from_f64(0.2 + 0.1 * k as f64, 256)).unwrap()).collect();
        assert!(!hankel_certificate(&vals, 1, None).unwrap().pass);
    }

    #[test]
    fn three_two_grid_has_nine_points() {
        let g = |x: &BigReal| Ok::<_, Infallible>(x.clone() + 1.0);
        let col = |x: &BigReal| Ok(usize::from(*x > 0.5));
        let c = vdw_composite_certificate(
            |x: &BigReal| g(x).map(|v| v.exp().unwrap()),
            &BigReal::zero(256),
            &BigReal::one(256),
            col,
            SubCertifier::ExpPoly { d: 1 },
            3,
            2,
            None,
        )
        .unwrap();
        assert_eq!(c.metadata["grid"]["m"], 8);
        assert!(c.pass);
    }
}
