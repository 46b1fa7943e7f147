use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::{BigReal, Result};

/// Scalar interface shared by `f64` and `BigReal`, so model code can run at
/// machine precision for screening and at full precision for polishing.
pub trait Real:
    Clone
    + Send
    + Sync
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Constant `v` at the precision of `self`.
    fn lift(&self, v: f64) -> Self;
    fn from_big(v: &BigReal, like: &Self) -> Self;
    fn to_big(&self, bits: u32) -> BigReal;
    fn as_f64(&self) -> f64;
    fn sin_r(&self) -> Result<Self>;
    fn cos_r(&self) -> Result<Self>;
    fn exp_r(&self) -> Result<Self>;
    fn tanh_r(&self) -> Self;
    fn sqrt_r(&self) -> Result<Self>;
    fn abs_r(&self) -> Self;
    fn atan2_r(&self, x: &Self) -> Self;
    fn is_finite_r(&self) -> bool;
}

impl Real for f64 {
    fn lift(&self, v: f64) -> Self {
        v
    }
    fn from_big(v: &BigReal, _: &Self) -> Self {
        v.to_f64()
    }
    fn to_big(&self, bits: u32) -> BigReal {
        BigReal::from_f64(*self, bits)
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    fn sin_r(&self) -> Result<Self> {
        Ok(self.sin())
    }
    fn cos_r(&self) -> Result<Self> {
        Ok(self.cos())
    }
    fn exp_r(&self) -> Result<Self> {
        let e = self.exp();
        if e.is_finite() {
            Ok(e)
        } else {
            Err(crate::BigError::NonFinite)
        }
    }
    fn tanh_r(&self) -> Self {
        self.tanh()
    }
    fn sqrt_r(&self) -> Result<Self> {
        if *self < 0.0 {
            return Err(crate::BigError::Domain("sqrt of negative".into()));
        }
        Ok(self.sqrt())
    }
    fn abs_r(&self) -> Self {
        self.abs()
    }
    fn atan2_r(&self, x: &Self) -> Self {
        self.atan2(*x)
    }
    fn is_finite_r(&self) -> bool {
        self.is_finite()
    }
}

impl Real for BigReal {
    fn lift(&self, v: f64) -> Self {
        BigReal::from_f64(v, self.bits())
    }
    fn from_big(v: &BigReal, like: &Self) -> Self {
        v.to_bits(like.bits())
    }
    fn to_big(&self, bits: u32) -> BigReal {
        self.to_bits(bits)
    }
    fn as_f64(&self) -> f64 {
        self.to_f64()
    }
    fn sin_r(&self) -> Result<Self> {
        self.sin()
    }
    fn cos_r(&self) -> Result<Self> {
        self.cos()
    }
    fn exp_r(&self) -> Result<Self> {
        self.exp()
    }
    fn tanh_r(&self) -> Self {
        self.tanh()
    }
    fn sqrt_r(&self) -> Result<Self> {
        self.sqrt()
    }
    fn abs_r(&self) -> Self {
        self.abs()
    }
    fn atan2_r(&self, x: &Self) -> Self {
        self.atan2(x)
    }
    fn is_finite_r(&self) -> bool {
        self.is_finite()
    }
}
