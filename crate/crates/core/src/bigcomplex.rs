//! Minimal extended-precision complex numbers (re, im) over [`BigFloat`].

use crate::specfun::{to_float, BigFloat, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct BigComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl BigComplex {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        Self { re, im }
    }

    pub fn one(prec: u32) -> Self {
        Self::new(BigFloat::with_val(prec, 1), BigFloat::new(prec))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn add(&self, o: &Self) -> Self {
        let prec = self.prec();
        Self::new(
            BigFloat::with_val(prec, &self.re + &o.re),
            BigFloat::with_val(prec, &self.im + &o.im),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        let prec = self.prec();
        Self::new(
            BigFloat::with_val(prec, &self.re - &o.re),
            BigFloat::with_val(prec, &self.im - &o.im),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        let prec = self.prec();
        let re = BigFloat::with_val(prec, &self.re * &o.re) - BigFloat::with_val(prec, &self.im * &o.im);
        let im = BigFloat::with_val(prec, &self.re * &o.im) + BigFloat::with_val(prec, &self.im * &o.re);
        Self::new(re, im)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let prec = self.prec();
        let f = to_float(s, prec);
        Self::new(
            BigFloat::with_val(prec, &self.re * &f),
            BigFloat::with_val(prec, &self.im * &f),
        )
    }

    pub fn norm_sqr(&self) -> BigFloat {
        let prec = self.prec();
        BigFloat::with_val(prec, self.re.square_ref()) + BigFloat::with_val(prec, self.im.square_ref())
    }

    pub fn abs(&self) -> BigFloat {
        self.norm_sqr().sqrt()
    }

    pub fn recip(&self) -> Self {
        let prec = self.prec();
        let d = self.norm_sqr();
        Self::new(
            BigFloat::with_val(prec, &self.re / &d),
            -BigFloat::with_val(prec, &self.im / &d),
        )
    }

    /// z^k for any integer k (z ≠ 0 when k < 0).
    pub fn powi(&self, k: i64) -> Self {
        let base = if k < 0 { self.recip() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::one(self.prec());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            sq = sq.mul(&sq);
            e >>= 1;
        }
        acc
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}
