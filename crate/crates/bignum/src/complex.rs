use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::{reduce_mod_2pi, BigError, BigReal, Result};

/// Complex number stored in rectangular form.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct BigComplex {
    pub re: BigReal,
    pub im: BigReal,
}

impl BigComplex {
    pub fn new(re: BigReal, im: BigReal) -> Self {
        BigComplex { re, im }
    }

    pub fn from_real(re: BigReal) -> Self {
        let im = BigReal::zero(re.bits());
        BigComplex { re, im }
    }

    pub fn zero(bits: u32) -> Self {
        BigComplex::new(BigReal::zero(bits), BigReal::zero(bits))
    }

    pub fn one(bits: u32) -> Self {
        BigComplex::new(BigReal::one(bits), BigReal::zero(bits))
    }

    pub fn i(bits: u32) -> Self {
        BigComplex::new(BigReal::zero(bits), BigReal::one(bits))
    }

    pub fn from_f64(re: f64, im: f64, bits: u32) -> Self {
        BigComplex::new(BigReal::from_f64(re, bits), BigReal::from_f64(im, bits))
    }

    /// `r·e^{iθ}`.
    pub fn from_polar(r: &BigReal, theta: &BigReal) -> Result<Self> {
        let (s, c) = theta.sin_cos()?;
        Ok(BigComplex::new(r * &c, r * &s))
    }

    pub fn bits(&self) -> u32 {
        self.re.bits().max(self.im.bits())
    }

    pub fn to_bits(&self, bits: u32) -> Self {
        BigComplex::new(self.re.to_bits(bits), self.im.to_bits(bits))
    }

    pub fn conj(&self) -> Self {
        BigComplex::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sqr(&self) -> BigReal {
        self.re.square() + self.im.square()
    }

    pub fn abs(&self) -> BigReal {
        self.re.hypot(&self.im)
    }

    /// Principal argument in `(-π, π]`.
    pub fn arg(&self) -> BigReal {
        self.im.atan2(&self.re)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn scale(&self, k: &BigReal) -> Self {
        BigComplex::new(&self.re * k, &self.im * k)
    }

    /// `e^z`, with the imaginary part reduced modulo 2π first.
    pub fn exp(&self) -> Result<Self> {
        let m = self.re.exp()?;
        let t = reduce_mod_2pi(&self.im)?;
        BigComplex::from_polar(&m, &t)
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(BigError::Domain("log of zero".into()));
        }
        Ok(BigComplex::new(self.abs().ln()?, self.arg()))
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = BigComplex::one(self.bits());
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    pub fn recip(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return Err(BigError::Domain("reciprocal of zero".into()));
        }
        Ok(BigComplex::new(&self.re / &n, -(&self.im / &n)))
    }
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} + {:?}i)", self.re, self.im)
    }
}

impl<'a> Add<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn add(self, o: &'a BigComplex) -> BigComplex {
        BigComplex::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn sub(self, o: &'a BigComplex) -> BigComplex {
        BigComplex::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn mul(self, o: &'a BigComplex) -> BigComplex {
        BigComplex::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl<'a> Div<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    /// Division by zero yields non-finite parts; use `recip` to get an error instead.
    fn div(self, o: &'a BigComplex) -> BigComplex {
        let n = o.norm_sqr();
        let re = &self.re * &o.re + &self.im * &o.im;
        let im = &self.im * &o.re - &self.re * &o.im;
        BigComplex::new(re / &n, im / &n)
    }
}

macro_rules! owned {
    ($tr:ident, $m:ident) => {
        impl $tr<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, o: BigComplex) -> BigComplex {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, o: &'a BigComplex) -> BigComplex {
                (&self).$m(o)
            }
        }
    };
}

owned!(Add, add);
owned!(Sub, sub);
owned!(Mul, mul);
owned!(Div, div);

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex::new(-self.re, -self.im)
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex::new(-&self.re, -&self.im)
    }
}
