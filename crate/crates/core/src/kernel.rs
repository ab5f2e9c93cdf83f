//! Arbitrary-precision complex arithmetic.
//!
//! Real parts and imaginary parts are MPFR floats. Every value carries its
//! own significand width; binary operations produce results at the width of
//! the left operand, so a computation started under one [`PrecisionContext`]
//! stays at that precision throughout.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rug::float::Constant;
use rug::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_BITS: u32 = 512;
pub const MIN_BITS: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("precision of {0} bits is below the minimum of {MIN_BITS}")]
    PrecisionTooLow(u32),
    #[error("singular operand in {0}")]
    SingularOperand(&'static str),
    #[error("non-finite result from {0}")]
    NonFinite(&'static str),
    #[error("cannot parse {0:?} as a decimal number")]
    Parse(String),
}

/// Significand width shared by every value in one computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrecisionContext {
    bits: u32,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext { bits: DEFAULT_BITS }
    }
}

impl PrecisionContext {
    pub fn new(bits: u32) -> Result<Self, KernelError> {
        if bits < MIN_BITS {
            return Err(KernelError::PrecisionTooLow(bits));
        }
        Ok(PrecisionContext { bits })
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn float(self, x: f64) -> Float {
        Float::with_val(self.bits, x)
    }

    /// `2^exp` at this precision.
    pub fn pow2(self, exp: i32) -> Float {
        Float::with_val(self.bits, 1) << exp
    }

    pub fn pi(self) -> Float {
        Float::with_val(self.bits, Constant::Pi)
    }

    pub fn zero(self) -> BigComplex {
        self.complex(0.0, 0.0)
    }

    pub fn one(self) -> BigComplex {
        self.complex(1.0, 0.0)
    }

    pub fn real(self, x: f64) -> BigComplex {
        self.complex(x, 0.0)
    }

    pub fn complex(self, re: f64, im: f64) -> BigComplex {
        BigComplex {
            re: self.float(re),
            im: self.float(im),
        }
    }

    pub fn from_c64(self, z: Complex64) -> BigComplex {
        self.complex(z.re, z.im)
    }

    /// Parses decimal strings, rounding once to this precision. `"1.6"`
    /// yields the 1.6 nearest at the context width, not the f64 nearest.
    pub fn parse_real(self, s: &str) -> Result<Float, KernelError> {
        let parsed = Float::parse(s.trim()).map_err(|_| KernelError::Parse(s.to_string()))?;
        let value = Float::with_val(self.bits, parsed);
        if !value.is_finite() {
            return Err(KernelError::Parse(s.to_string()));
        }
        Ok(value)
    }

    pub fn parse(self, re: &str, im: &str) -> Result<BigComplex, KernelError> {
        Ok(BigComplex {
            re: self.parse_real(re)?,
            im: self.parse_real(im)?,
        })
    }
}

/// Operations exposed through [`arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Sqrt,
    Ln,
    Abs,
    Conj,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BigComplex {
    re: Float,
    im: Float,
}

impl BigComplex {
    /// Both parts are rounded to `prec` bits.
    pub fn from_parts(prec: u32, re: &Float, im: &Float) -> Self {
        BigComplex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        BigComplex { re, im }
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn ctx(&self) -> PrecisionContext {
        PrecisionContext { bits: self.prec() }
    }

    /// Rounds to another precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        BigComplex::from_parts(prec, &self.re, &self.im)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        let mut n = Float::with_val(p, self.re.square_ref());
        n += Float::with_val(p, self.im.square_ref());
        n
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn conj(&self) -> Self {
        BigComplex {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn scale(&self, k: &Float) -> Self {
        let p = self.prec();
        BigComplex {
            re: Float::with_val(p, &self.re * k),
            im: Float::with_val(p, &self.im * k),
        }
    }

    pub fn recip(&self) -> Result<Self, KernelError> {
        if self.is_zero() {
            return Err(KernelError::SingularOperand("reciprocal"));
        }
        let n = self.norm_sqr();
        let p = self.prec();
        let out = BigComplex {
            re: Float::with_val(p, &self.re / &n),
            im: -Float::with_val(p, &self.im / &n),
        };
        finite(out, "reciprocal")
    }

    pub fn checked_div(&self, rhs: &BigComplex) -> Result<Self, KernelError> {
        if rhs.is_zero() {
            return Err(KernelError::SingularOperand("division"));
        }
        let p = self.prec();
        let n = rhs.norm_sqr();
        // (a + bi)(c - di) / (c^2 + d^2)
        let mut re = Float::with_val(p, &self.re * &rhs.re);
        re += Float::with_val(p, &self.im * &rhs.im);
        let mut im = Float::with_val(p, &self.im * &rhs.re);
        im -= Float::with_val(p, &self.re * &rhs.im);
        re /= &n;
        im /= &n;
        finite(BigComplex { re, im }, "division")
    }

    /// Principal square root; the result has non-negative real part, and
    /// the negative real axis maps onto the positive imaginary axis.
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.is_zero() {
            return BigComplex::from_real(Float::new(p));
        }
        let r = self.abs();
        let im = positive_zero(&self.im);
        if !self.re.is_sign_negative() {
            let t = Float::with_val(p, &r + &self.re) / 2u32;
            let t = t.sqrt();
            let u = Float::with_val(p, &im / &t) / 2u32;
            BigComplex { re: t, im: u }
        } else {
            let t = Float::with_val(p, &r - &self.re) / 2u32;
            let t = t.sqrt();
            let u = Float::with_val(p, im.abs_ref()) / &t / 2u32;
            let v = if im.is_sign_negative() { -t } else { t };
            BigComplex { re: u, im: v }
        }
    }

    /// Principal logarithm, imaginary part in (-pi, pi].
    pub fn ln(&self) -> Result<Self, KernelError> {
        if self.is_zero() {
            return Err(KernelError::SingularOperand("logarithm"));
        }
        let p = self.prec();
        // ln|z| = log1p(|z|^2 - 1) / 2 with the norm formed exactly enough
        // that |z| near 1 keeps full relative accuracy.
        let wp = 2 * p + 32;
        let mut n = Float::with_val(wp, self.re.square_ref());
        n += Float::with_val(wp, self.im.square_ref());
        n -= 1u32;
        let re = Float::with_val(p, n.ln_1p_ref()) / 2u32;
        let im_part = positive_zero(&self.im);
        let im = Float::with_val(p, im_part.atan2_ref(&self.re));
        finite(BigComplex { re, im }, "logarithm")
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut result = self.ctx().one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

fn positive_zero(x: &Float) -> Float {
    if x.is_zero() {
        Float::new(x.prec())
    } else {
        x.clone()
    }
}

fn finite(z: BigComplex, what: &'static str) -> Result<BigComplex, KernelError> {
    if z.is_finite() {
        Ok(z)
    } else {
        Err(KernelError::NonFinite(what))
    }
}

/// Dispatches one kernel operation. Binary operations require `y`.
pub fn arith(op: ArithOp, x: &BigComplex, y: Option<&BigComplex>) -> Result<BigComplex, KernelError> {
    let rhs = || y.ok_or(KernelError::SingularOperand("missing second operand"));
    match op {
        ArithOp::Add => Ok(x + rhs()?),
        ArithOp::Sub => Ok(x - rhs()?),
        ArithOp::Mul => Ok(x * rhs()?),
        ArithOp::Div => x.checked_div(rhs()?),
        ArithOp::Sqrt => Ok(x.sqrt()),
        ArithOp::Ln => x.ln(),
        ArithOp::Abs => Ok(BigComplex::from_real(x.abs())),
        ArithOp::Conj => Ok(x.conj()),
    }
}

impl<'a, 'b> Add<&'b BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &'b BigComplex) -> BigComplex {
        let p = self.prec();
        BigComplex {
            re: Float::with_val(p, &self.re + &rhs.re),
            im: Float::with_val(p, &self.im + &rhs.im),
        }
    }
}

impl<'a, 'b> Sub<&'b BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: &'b BigComplex) -> BigComplex {
        let p = self.prec();
        BigComplex {
            re: Float::with_val(p, &self.re - &rhs.re),
            im: Float::with_val(p, &self.im - &rhs.im),
        }
    }
}

impl<'a, 'b> Mul<&'b BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &'b BigComplex) -> BigComplex {
        let p = self.prec();
        let mut re = Float::with_val(p, &self.re * &rhs.re);
        re -= Float::with_val(p, &self.im * &rhs.im);
        let mut im = Float::with_val(p, &self.re * &rhs.im);
        im += Float::with_val(p, &self.im * &rhs.re);
        BigComplex { re, im }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: BigComplex) -> BigComplex {
                (&self).$method(&rhs)
            }
        }
        impl<'b> $tr<&'b BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: &'b BigComplex) -> BigComplex {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<BigComplex> for &'a BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: BigComplex) -> BigComplex {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl<'a> Neg for &'a BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        -self.clone()
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        write!(
            f,
            "{}{}{}i",
            fmt_real(&self.re, digits),
            if self.im.is_sign_negative() { "-" } else { "+" },
            fmt_real(&Float::with_val(self.prec(), self.im.abs_ref()), digits)
        )
    }
}

/// Decimal rendering with `digits` significant digits, e.g. `-1.25e-3`.
pub fn fmt_real(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let s = x.to_string_radix(10, Some(digits));
    tidy_exponent(&s)
}

fn tidy_exponent(s: &str) -> String {
    match s.split_once('e') {
        Some((mantissa, exp)) => {
            let exp: i64 = exp.parse().unwrap_or(0);
            if exp == 0 {
                mantissa.to_string()
            } else {
                format!("{mantissa}e{exp}")
            }
        }
        None => s.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn rel_err(a: &BigComplex, b: &BigComplex) -> f64 {
        let d = (a - b).abs();
        let s = b.abs();
        if s.is_zero() {
            d.to_f64()
        } else {
            Float::with_val(a.prec(), &d / &s).to_f64()
        }
    }

    #[test]
    fn rejects_low_precision() {
        assert_eq!(PrecisionContext::new(32), Err(KernelError::PrecisionTooLow(32)));
        assert_eq!(PrecisionContext::new(64).unwrap().bits(), 64);
    }

    #[test]
    fn integer_product_is_exact() {
        let c = ctx();
        let p = &c.complex(1.0, 2.0) * &c.complex(3.0, 4.0);
        assert_eq!(p, c.complex(-5.0, 10.0));
    }

    #[test]
    fn ln_of_minus_one_is_i_pi() {
        let c = ctx();
        let l = c.real(-1.0).ln().unwrap();
        assert!(l.re().is_zero());
        assert_eq!(*l.im(), c.pi());
        // negative zero imaginary part still lands on the principal branch
        let z = BigComplex::from_parts(c.bits(), &c.float(-1.0), &c.float(-0.0));
        assert_eq!(*z.ln().unwrap().im(), c.pi());
    }

    #[test]
    fn sqrt_of_minus_four_is_two_i() {
        let c = ctx();
        assert_eq!(c.real(-4.0).sqrt(), c.complex(0.0, 2.0));
        assert_eq!(c.complex(0.0, -0.0).sqrt(), c.zero());
        let s = c.complex(-3.0, -4.0).sqrt();
        assert_eq!(s, c.complex(1.0, -2.0));
    }

    #[test]
    fn singular_operands_are_errors() {
        let c = ctx();
        assert_eq!(c.one().checked_div(&c.zero()), Err(KernelError::SingularOperand("division")));
        assert_eq!(c.zero().ln(), Err(KernelError::SingularOperand("logarithm")));
        assert!(c.zero().recip().is_err());
        assert!(arith(ArithOp::Add, &c.one(), None).is_err());
    }

    #[test]
    fn ln_near_one_keeps_relative_accuracy() {
        let c = ctx();
        let tiny = c.pow2(-300);
        let z = BigComplex::from_real(Float::with_val(c.bits(), 1 + &tiny));
        let l = z.ln().unwrap();
        // ln(1 + t) = t - t^2/2 + ...
        let rel = Float::with_val(c.bits(), l.re() - &tiny) / &tiny;
        assert!(rel.to_f64().abs() < 1e-80);
    }

    #[test]
    fn arith_dispatch() {
        let c = ctx();
        let x = c.complex(3.0, 4.0);
        let y = c.complex(1.0, -1.0);
        assert_eq!(arith(ArithOp::Abs, &x, None).unwrap(), c.real(5.0));
        assert_eq!(arith(ArithOp::Conj, &x, None).unwrap(), c.complex(3.0, -4.0));
        assert_eq!(arith(ArithOp::Sub, &x, Some(&y)).unwrap(), c.complex(2.0, 5.0));
        let q = arith(ArithOp::Div, &x, Some(&y)).unwrap();
        assert!(rel_err(&q, &c.complex(-0.5, 3.5)) < 1e-150);
    }

    #[test]
    fn parse_rounds_at_context_precision() {
        let c = ctx();
        let x = c.parse_real("1.6").unwrap();
        let exact = Float::with_val(c.bits(), 16) / 10u32;
        assert_eq!(x, exact);
        assert!(c.parse_real("abc").is_err());
    }

    #[test]
    fn display_is_readable() {
        let c = ctx();
        assert_eq!(format!("{:.5}", c.complex(1.5, -0.25)), "1.5000-2.5000e-1i");
    }

    proptest::proptest! {
        #[test]
        fn sqrt_squares_back(re in -1e6f64..1e6, im in -1e6f64..1e6) {
            let c = ctx();
            let x = c.complex(re, im);
            proptest::prop_assume!(!x.is_zero());
            let s = x.sqrt();
            proptest::prop_assert!(rel_err(&(&s * &s), &x) < 2f64.powi(-(512 - 8)));
            proptest::prop_assert!(!s.re().is_sign_negative());
        }

        #[test]
        fn conj_is_an_involution(re in -1e6f64..1e6, im in -1e6f64..1e6) {
            let x = ctx().complex(re, im);
            proptest::prop_assert_eq!(x.conj().conj(), x);
        }

        #[test]
        fn ln_imaginary_part_is_principal(re in -1e3f64..1e3, im in -1e3f64..1e3) {
            let c = ctx();
            let x = c.complex(re, im);
            proptest::prop_assume!(!x.is_zero());
            let l = x.ln().unwrap();
            let pi = c.pi();
            proptest::prop_assert!(*l.im() <= pi && *l.im() > -pi);
        }

        #[test]
        fn division_inverts_multiplication(a in -1e3f64..1e3, b in -1e3f64..1e3, cr in 0.1f64..1e3, ci in -1e3f64..1e3) {
            let c = ctx();
            let x = c.complex(a, b);
            let y = c.complex(cr, ci);
            let q = (&x * &y).checked_div(&y).unwrap();
            proptest::prop_assert!((&q - &x).abs_f64() <= 2f64.powi(-(512 - 8)) * (x.abs_f64() + 1.0));
        }
    }
}
