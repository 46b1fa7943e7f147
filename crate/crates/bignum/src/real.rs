use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::Float;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{default_bits, precision_ceiling, BigError, Result};

/// Real number with an explicit binary precision.
#[derive(Clone)]
pub struct BigReal(Float);

impl BigReal {
    pub fn from_float(f: Float) -> Self {
        BigReal(f)
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    pub fn zero(bits: u32) -> Self {
        BigReal(Float::new(bits))
    }

    pub fn one(bits: u32) -> Self {
        BigReal(Float::with_val(bits, 1))
    }

    pub fn from_f64(v: f64, bits: u32) -> Self {
        BigReal(Float::with_val(bits, v))
    }

    pub fn from_i64(v: i64, bits: u32) -> Self {
        BigReal(Float::with_val(bits, v))
    }

    /// Exact ratio `num/den` rounded once at `bits`.
    pub fn ratio(num: i64, den: i64, bits: u32) -> Self {
        let r = rug::Rational::from((num, den));
        BigReal(Float::with_val(bits, &r))
    }

    pub fn pi(bits: u32) -> Self {
        BigReal(Float::with_val(bits, Constant::Pi))
    }

    pub fn two_pi(bits: u32) -> Self {
        let mut f = Float::with_val(bits, Constant::Pi);
        f *= 2;
        BigReal(f)
    }

    /// `2^(1-bits)`, the relative spacing of floats at this precision.
    pub fn epsilon(bits: u32) -> Self {
        Self::one(bits).ldexp(1 - bits as i32)
    }

    pub fn bits(&self) -> u32 {
        self.0.prec()
    }

    /// Same value rounded to a new precision.
    pub fn to_bits(&self, bits: u32) -> Self {
        BigReal(Float::with_val(bits, &self.0))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.0.to_integer().and_then(|i| i.to_i64())
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    /// Binary exponent `e` with `2^(e-1) <= |x| < 2^e`; `None` for zero or non-finite.
    pub fn exponent(&self) -> Option<i32> {
        self.0.get_exp()
    }

    pub fn abs(&self) -> Self {
        BigReal(self.0.clone().abs())
    }

    pub fn signum(&self) -> i32 {
        match self.0.cmp0() {
            Some(Ordering::Less) => -1,
            Some(Ordering::Greater) => 1,
            _ => 0,
        }
    }

    pub fn recip(&self) -> Self {
        BigReal(self.0.clone().recip())
    }

    pub fn square(&self) -> Self {
        BigReal(self.0.clone().square())
    }

    /// `x * 2^k`, exact.
    pub fn ldexp(&self, k: i32) -> Self {
        let mut f = self.0.clone();
        f <<= k;
        BigReal(f)
    }

    pub fn powi(&self, n: i32) -> Self {
        BigReal(rug::ops::Pow::pow(self.0.clone(), n))
    }

    pub fn floor(&self) -> Self {
        BigReal(self.0.clone().floor())
    }

    pub fn round(&self) -> Self {
        BigReal(self.0.clone().round())
    }

    pub fn max(&self, other: &Self) -> Self {
        if self >= other {
            self.to_bits(self.bits().max(other.bits()))
        } else {
            other.to_bits(self.bits().max(other.bits()))
        }
    }

    pub fn min(&self, other: &Self) -> Self {
        if self <= other {
            self.to_bits(self.bits().max(other.bits()))
        } else {
            other.to_bits(self.bits().max(other.bits()))
        }
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.is_negative() {
            return Err(BigError::Domain(format!("sqrt of negative {}", self.to_f64())));
        }
        Ok(BigReal(self.0.clone().sqrt()))
    }

    pub fn hypot(&self, other: &Self) -> Self {
        let p = self.bits().max(other.bits());
        BigReal(Float::with_val(p, self.0.hypot_ref(&other.0)))
    }

    /// Sine after explicit reduction modulo 2π.
    pub fn sin(&self) -> Result<Self> {
        let r = reduce_mod_2pi(self)?;
        Ok(BigReal(r.0.sin()))
    }

    pub fn cos(&self) -> Result<Self> {
        let r = reduce_mod_2pi(self)?;
        Ok(BigReal(r.0.cos()))
    }

    pub fn sin_cos(&self) -> Result<(Self, Self)> {
        let r = reduce_mod_2pi(self)?;
        let bits = r.bits();
        let (s, c) = r.0.sin_cos(Float::new(bits));
        Ok((BigReal(s), BigReal(c)))
    }

    pub fn exp(&self) -> Result<Self> {
        let e = self.0.clone().exp();
        if e.is_finite() {
            Ok(BigReal(e))
        } else {
            Err(BigError::NonFinite)
        }
    }

    pub fn ln(&self) -> Result<Self> {
        if self.signum() <= 0 {
            return Err(BigError::Domain(format!("log of non-positive {}", self.to_f64())));
        }
        Ok(BigReal(self.0.clone().ln()))
    }

    pub fn log2(&self) -> Result<Self> {
        if self.signum() <= 0 {
            return Err(BigError::Domain(format!("log2 of non-positive {}", self.to_f64())));
        }
        Ok(BigReal(self.0.clone().log2()))
    }

    pub fn asin(&self) -> Result<Self> {
        if self.0.clone().abs() > 1 {
            return Err(BigError::Domain(format!("arcsin of {}", self.to_f64())));
        }
        Ok(BigReal(self.0.clone().asin()))
    }

    pub fn atan(&self) -> Self {
        BigReal(self.0.clone().atan())
    }

    /// Angle of the point `(x, self)`.
    pub fn atan2(&self, x: &Self) -> Self {
        let p = self.bits().max(x.bits());
        BigReal(Float::with_val(p, self.0.atan2_ref(&x.0)))
    }

    pub fn tanh(&self) -> Self {
        BigReal(self.0.clone().tanh())
    }

    /// Decimal mantissa with enough digits to round-trip at this precision.
    pub fn to_decimal(&self) -> String {
        if self.0.is_zero() {
            return "0".into();
        }
        let digits = (self.bits() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2;
        self.0.to_string_radix(10, Some(digits))
    }

    /// Short decimal for diagnostics.
    pub fn to_short(&self, digits: usize) -> String {
        self.0.to_string_radix(10, Some(digits.max(1)))
    }

    /// Parses `"<decimal>@<bits>"`; a bare decimal uses the default precision.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.rsplit_once('@') {
            Some((num, bits)) => {
                let bits: u32 = bits.trim().parse().map_err(|_| BigError::Parse(s.into()))?;
                if bits < rug::float::prec_min() || bits > rug::float::prec_max() {
                    return Err(BigError::Parse(s.into()));
                }
                Self::parse_with_bits(num, bits)
            }
            None => Self::parse_with_bits(s, default_bits()),
        }
    }

    pub fn parse_with_bits(s: &str, bits: u32) -> Result<Self> {
        let t = s.trim();
        let named = match t.to_ascii_lowercase().as_str() {
            "pi" => Some(Self::pi(bits)),
            "2pi" | "tau" => Some(Self::two_pi(bits)),
            "-pi" => Some(-Self::pi(bits)),
            _ => None,
        };
        if let Some(v) = named {
            return Ok(v);
        }
        let inc = Float::parse(t).map_err(|_| BigError::Parse(t.into()))?;
        let f = Float::with_val(bits, inc);
        if !f.is_finite() {
            return Err(BigError::Parse(t.into()));
        }
        Ok(BigReal(f))
    }
}

/// Reduces `x` into `[0, 2π)`.
///
/// π is evaluated at `bits + max(0, ⌈log2|x|⌉) + 32` bits so that the
/// subtraction of a large multiple of 2π does not cancel away the result.
pub fn reduce_mod_2pi(x: &BigReal) -> Result<BigReal> {
    if !x.is_finite() {
        return Err(BigError::NonFinite);
    }
    let bits = x.bits();
    if x.is_zero() {
        return Ok(BigReal::zero(bits));
    }
    let mag = x.exponent().unwrap_or(0).max(0) as u32;
    let guard = bits + mag + 32;
    let ceiling = precision_ceiling();
    if guard > ceiling {
        return Err(BigError::PrecisionExhausted { needed: guard, ceiling });
    }
    let mut tau = Float::with_val(guard, Constant::Pi);
    tau *= 2;
    let xg = Float::with_val(guard, &x.0);
    let q = Float::with_val(guard, &xg / &tau).floor();
    let mut r = Float::with_val(guard, &q * &tau);
    r = Float::with_val(guard, &xg - &r);
    if r < 0 {
        r += &tau;
    }
    if r >= tau {
        r -= &tau;
    }
    let out = Float::with_val(bits, &r);
    let tau_out = Float::with_val(bits, &tau);
    if out >= tau_out {
        return Ok(BigReal::zero(bits));
    }
    Ok(BigReal(out))
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(d) => write!(f, "{}", self.to_short(d)),
            None => write!(f, "{}", self.to_decimal()),
        }
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.to_short(20), self.bits())
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl PartialEq<f64> for BigReal {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for BigReal {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident, $op:tt) => {
        impl<'a> $tr<&'a BigReal> for &'a BigReal {
            type Output = BigReal;
            fn $m(self, rhs: &'a BigReal) -> BigReal {
                let p = self.bits().max(rhs.bits());
                BigReal(Float::with_val(p, &self.0 $op &rhs.0))
            }
        }
        impl $tr<BigReal> for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: BigReal) -> BigReal {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a BigReal> for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: &'a BigReal) -> BigReal {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<BigReal> for &'a BigReal {
            type Output = BigReal;
            fn $m(self, rhs: BigReal) -> BigReal {
                self.$m(&rhs)
            }
        }
        impl<'a> $tr<f64> for &'a BigReal {
            type Output = BigReal;
            fn $m(self, rhs: f64) -> BigReal {
                self.$m(&BigReal::from_f64(rhs, self.bits().max(53)))
            }
        }
        impl $tr<f64> for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: f64) -> BigReal {
                (&self).$m(rhs)
            }
        }
        impl $atr<&BigReal> for BigReal {
            fn $am(&mut self, rhs: &BigReal) {
                let v = (&*self).$m(rhs);
                *self = v;
            }
        }
        impl $atr<BigReal> for BigReal {
            fn $am(&mut self, rhs: BigReal) {
                let v = (&*self).$m(&rhs);
                *self = v;
            }
        }
        impl $atr<f64> for BigReal {
            fn $am(&mut self, rhs: f64) {
                let v = (&*self).$m(rhs);
                *self = v;
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign, +);
binop!(Sub, sub, SubAssign, sub_assign, -);
binop!(Mul, mul, MulAssign, mul_assign, *);
binop!(Div, div, DivAssign, div_assign, /);

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0)
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0.clone())
    }
}

impl Sum for BigReal {
    fn sum<I: Iterator<Item = BigReal>>(iter: I) -> BigReal {
        let mut acc: Option<BigReal> = None;
        for v in iter {
            acc = Some(match acc {
                None => v,
                Some(a) => a + v,
            });
        }
        acc.unwrap_or_else(|| BigReal::zero(default_bits()))
    }
}

impl<'a> Sum<&'a BigReal> for BigReal {
    fn sum<I: Iterator<Item = &'a BigReal>>(iter: I) -> BigReal {
        iter.cloned().sum()
    }
}

impl Serialize for BigReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}@{}", self.to_decimal(), self.bits()))
    }
}

struct BigRealVisitor;

impl<'de> Visitor<'de> for BigRealVisitor {
    type Value = BigReal;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a \"<decimal>@<bits>\" string or a number")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<BigReal, E> {
        BigReal::parse(v).map_err(E::custom)
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<BigReal, E> {
        if v.is_finite() {
            Ok(BigReal::from_f64(v, default_bits()))
        } else {
            Err(E::custom("non-finite number"))
        }
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<BigReal, E> {
        Ok(BigReal::from_i64(v, default_bits()))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<BigReal, E> {
        Ok(BigReal(Float::with_val(default_bits(), v)))
    }
}

impl<'de> Deserialize<'de> for BigReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<BigReal, D::Error> {
        d.deserialize_any(BigRealVisitor)
    }
}
