use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use xprlab_bignum::{BigComplex, BigReal};

use crate::{FamilyError, FamilyParams};

#[derive(Debug, thiserror::Error)]
pub enum GridError {
    #[error("grid needs m >= 1, got {0}")]
    TooShort(usize),
    #[error("grid step must be positive")]
    Step,
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("evaluation failed at index {index}: {source}")]
    Eval { index: usize, source: FamilyError },
    #[error("csv: {0}")]
    Csv(String),
}

/// Samples of a function on `a, a+h, …, a+mh`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid<T = BigReal> {
    pub a: BigReal,
    pub h: BigReal,
    pub m: usize,
    pub values: Vec<T>,
    #[serde(default)]
    pub domain_restricted: bool,
}

impl<T: Clone> SampleGrid<T> {
    pub fn new(a: BigReal, h: BigReal, m: usize, values: Vec<T>) -> Result<Self, GridError> {
        if values.len() != m + 1 {
            return Err(GridError::Length { expected: m + 1, got: values.len() });
        }
        if m > 0 && h.signum() <= 0 {
            return Err(GridError::Step);
        }
        let end = &a + &h * (m as f64);
        let domain_restricted = a >= 0.0 && end <= 1.0;
        Ok(SampleGrid { a, h, m, values, domain_restricted })
    }

    pub fn x(&self, k: usize) -> BigReal {
        &self.a + &self.h * (k as f64)
    }

    /// Points `start, start+step, …` (`count` of them, 0-based) as a new grid.
    pub fn sub_progression(&self, start: usize, step: usize, count: usize) -> Result<Self, GridError> {
        if count == 0 || step == 0 || start + step * (count - 1) > self.m {
            return Err(GridError::Length { expected: start + step * count.saturating_sub(1) + 1, got: self.m + 1 });
        }
        let values = (0..count).map(|i| self.values[start + i * step].clone()).collect();
        SampleGrid::new(self.x(start), &self.h * (step as f64), count - 1, values)
    }
}

fn check(h: &BigReal, m: usize) -> Result<(), GridError> {
    if m < 1 {
        return Err(GridError::TooShort(m));
    }
    if h.signum() <= 0 {
        return Err(GridError::Step);
    }
    Ok(())
}

/// `values[k] = evaluate(params, a + k·h)` for `k = 0..=m`.
pub fn sample(params: &FamilyParams, a: &BigReal, h: &BigReal, m: usize) -> Result<SampleGrid, GridError> {
    check(h, m)?;
    let values = (0..=m)
        .into_par_iter()
        .map(|k| params.evaluate(&(a + h * (k as f64))).map_err(|source| GridError::Eval { index: k, source }))
        .collect::<Result<Vec<_>, _>>()?;
    SampleGrid::new(a.clone(), h.clone(), m, values)
}

/// Complex samples; `H3` skips its realness check, other families embed as real.
pub fn sample_complex(
    params: &FamilyParams,
    a: &BigReal,
    h: &BigReal,
    m: usize,
) -> Result<SampleGrid<BigComplex>, GridError> {
    check(h, m)?;
    let values = (0..=m)
        .into_par_iter()
        .map(|k| {
            let x = a + h * (k as f64);
            let v = match params {
                FamilyParams::H3(p) => p.eval_complex(&x),
                other => other.evaluate(&x).map(BigComplex::from_real),
            };
            v.map_err(|source| GridError::Eval { index: k, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    SampleGrid::new(a.clone(), h.clone(), m, values)
}

impl SampleGrid<BigReal> {
    /// CSV with columns `index,x,value`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), GridError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["index", "x", "value"]).map_err(|e| GridError::Csv(e.to_string()))?;
        for (k, v) in self.values.iter().enumerate() {
            let x = self.x(k);
            out.write_record([k.to_string(), format!("{}@{}", x, x.bits()), format!("{}@{}", v, v.bits())])
                .map_err(|e| GridError::Csv(e.to_string()))?;
        }
        out.flush().map_err(|e| GridError::Csv(e.to_string()))
    }

    /// Reads the `index,x,value` layout back; the step is taken from the first two rows.
    pub fn read_csv<R: Read>(r: R) -> Result<Self, GridError> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut rows: Vec<(usize, BigReal, BigReal)> = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| GridError::Csv(e.to_string()))?;
            let field = |i: usize| rec.get(i).ok_or_else(|| GridError::Csv(format!("missing column {i}")));
            let idx: usize = field(0)?.trim().parse().map_err(|_| GridError::Csv("bad index".into()))?;
            let x = BigReal::parse(field(1)?).map_err(|e| GridError::Csv(e.to_string()))?;
            let v = BigReal::parse(field(2)?).map_err(|e| GridError::Csv(e.to_string()))?;
            rows.push((idx, x, v));
        }
        rows.sort_by_key(|r| r.0);
        if rows.len() < 2 {
            return Err(GridError::TooShort(rows.len().saturating_sub(1)));
        }
        if rows.iter().enumerate().any(|(k, r)| r.0 != k) {
            return Err(GridError::Csv("indices must run 0..=m".into()));
        }
        let a = rows[0].1.clone();
        let h = &rows[1].1 - &a;
        let m = rows.len() - 1;
        let values = rows.into_iter().map(|r| r.2).collect();
        SampleGrid::new(a, h, m, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{SineSumParams, Wave};

    const B: u32 = 256;

    #[test]
    fn zeros_of_sin_two_pi_x() {
        let p = FamilyParams::H2(SineSumParams::new(vec![Wave::new(BigReal::one(B), BigReal::two_pi(B), BigReal::zero(B))]).unwrap());
        let g = sample(&p, &BigReal::zero(B), &BigReal::from_f64(0.5, B), 2).unwrap();
        assert!(g.values.iter().all(|v| v.abs() < BigReal::one(B).ldexp(-240)));
        assert!(g.domain_restricted);
    }

    #[test]
    fn constant_zero_member() {
        let p = FamilyParams::H2(SineSumParams::new(vec![Wave::from_f64(0.0, 3.0, 1.0, B)]).unwrap());
        let g = sample(&p, &BigReal::from_f64(0.1, B), &BigReal::from_f64(0.2, B), 4).unwrap();
        assert!(g.values.iter().all(BigReal::is_zero));
    }

    #[test]
    fn rejects_bad_specs() {
        let p = FamilyParams::H2(SineSumParams::new(vec![Wave::from_f64(1.0, 1.0, 0.0, B)]).unwrap());
        assert!(matches!(sample(&p, &BigReal::zero(B), &BigReal::one(B), 0), Err(GridError::TooShort(0))));
        assert!(matches!(sample(&p, &BigReal::zero(B), &BigReal::zero(B), 3), Err(GridError::Step)));
    }

    #[test]
    fn eval_errors_carry_the_index() {
        let p: FamilyParams = serde_json::from_str(
            r#"{"family":"H3","params":{"polys":[[{"re":"0","im":"0"}]],
                "numerator":[{"coef":{"re":"1","im":"0"},"exps":[0,0]}],
                "denominator":[{"coef":{"re":"1","im":"0"},"exps":[1,0]},{"coef":{"re":"-0.5","im":"0"},"exps":[0,0]}]}}"#,
        )
        .unwrap();
        match sample(&p, &BigReal::zero(B), &BigReal::from_f64(0.25, B), 3) {
            Err(GridError::Eval { index: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn csv_round_trip() {
        let p = FamilyParams::H2(SineSumParams::new(vec![Wave::from_f64(1.3, 7.0, 0.2, B)]).unwrap());
        let g = sample(&p, &BigReal::from_f64(0.125, B), &BigReal::from_f64(0.0625, B), 6).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("index,x,value\n"));
        let back = SampleGrid::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.m, 6);
        assert_eq!(back.values, g.values);
    }

    #[test]
    fn sub_progressions() {
        let vals: Vec<BigReal> = (0..9).map(|k| BigReal::from_i64(k, 64)).collect();
        let g = SampleGrid::new(BigReal::zero(64), BigReal::from_f64(0.125, 64), 8, vals).unwrap();
        let s = g.sub_progression(1, 3, 3).unwrap();
        assert_eq!(s.values, vec![BigReal::from_i64(1, 64), BigReal::from_i64(4, 64), BigReal::from_i64(7, 64)]);
        assert_eq!(s.h, 0.375);
        assert!(g.sub_progression(2, 4, 3).is_err());
    }
}
