//! Arbitrary-precision complex numbers and adaptive-precision evaluation.
//!
//! [`BigComplex`] wraps an MPC value; every binary operation rounds its result
//! to the smaller of the two operand precisions, so a computation never claims
//! more bits than its least precise input carried.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};

use crate::error::{Error, Result};

/// Smallest working precision accepted anywhere in the crate.
pub const MIN_PREC_BITS: u32 = 64;
/// Starting precision for adaptive evaluation.
pub const DEFAULT_INITIAL_PREC_BITS: u32 = 128;

#[derive(Clone, Debug, PartialEq)]
pub struct BigComplex {
    inner: Complex,
}

fn clamp_prec(prec: u32) -> u32 {
    prec.max(MIN_PREC_BITS)
}

impl BigComplex {
    pub fn new(prec: u32, re: f64, im: f64) -> Self {
        BigComplex {
            inner: Complex::with_val(clamp_prec(prec), (re, im)),
        }
    }

    pub fn from_real(prec: u32, re: f64) -> Self {
        Self::new(prec, re, 0.0)
    }

    pub fn from_floats(re: Float, im: Float) -> Self {
        let prec = clamp_prec(re.prec().min(im.prec()));
        BigComplex {
            inner: Complex::with_val(prec, (re, im)),
        }
    }

    pub fn from_float(re: Float) -> Self {
        let prec = clamp_prec(re.prec());
        BigComplex {
            inner: Complex::with_val(prec, (re, 0)),
        }
    }

    pub fn from_complex(inner: Complex) -> Self {
        let (p, q) = inner.prec();
        let prec = clamp_prec(p.min(q));
        if prec == p && prec == q {
            BigComplex { inner }
        } else {
            BigComplex {
                inner: Complex::with_val(prec, inner),
            }
        }
    }

    /// Parses decimal strings for the real and imaginary parts.
    pub fn parse(prec: u32, re: &str, im: &str) -> Result<Self> {
        let prec = clamp_prec(prec);
        let pr = Float::parse(re.trim()).map_err(|e| Error::Arg(format!("bad real part {re:?}: {e}")))?;
        let pi = Float::parse(im.trim()).map_err(|e| Error::Arg(format!("bad imaginary part {im:?}: {e}")))?;
        Ok(Self::from_floats(Float::with_val(prec, pr), Float::with_val(prec, pi)))
    }

    pub fn zero(prec: u32) -> Self {
        Self::new(prec, 0.0, 0.0)
    }

    pub fn one(prec: u32) -> Self {
        Self::new(prec, 1.0, 0.0)
    }

    pub fn i(prec: u32) -> Self {
        Self::new(prec, 0.0, 1.0)
    }

    /// `2πi` at the given precision.
    pub fn two_pi_i(prec: u32) -> Self {
        let tp = Float::with_val(clamp_prec(prec), Constant::Pi) * 2u32;
        Self::from_floats(Float::new(clamp_prec(prec)), tp)
    }

    pub fn prec(&self) -> u32 {
        let (p, q) = self.inner.prec();
        p.min(q)
    }

    /// Same value rounded to another precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        BigComplex {
            inner: Complex::with_val(clamp_prec(prec), &self.inner),
        }
    }

    pub fn re(&self) -> &Float {
        self.inner.real()
    }

    pub fn im(&self) -> &Float {
        self.inner.imag()
    }

    pub fn as_complex(&self) -> &Complex {
        &self.inner
    }

    pub fn into_complex(self) -> Complex {
        self.inner
    }

    pub fn re_f64(&self) -> f64 {
        self.inner.real().to_f64()
    }

    pub fn im_f64(&self) -> f64 {
        self.inner.imag().to_f64()
    }

    pub fn to_c64(&self) -> (f64, f64) {
        (self.re_f64(), self.im_f64())
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.inner.abs_ref())
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    /// Principal argument in (−π, π].
    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.inner.arg_ref())
    }

    pub fn conj(&self) -> Self {
        BigComplex {
            inner: self.inner.clone().conj(),
        }
    }

    pub fn mul_i(&self) -> Self {
        BigComplex {
            inner: self.inner.clone().mul_i(false),
        }
    }

    pub fn recip(&self) -> Self {
        BigComplex {
            inner: self.inner.clone().recip(),
        }
    }

    pub fn square(&self) -> Self {
        BigComplex {
            inner: self.inner.clone().square(),
        }
    }

    pub fn exp(&self) -> Self {
        BigComplex {
            inner: self.inner.clone().exp(),
        }
    }

    /// Principal logarithm, imaginary part in (−π, π].
    pub fn ln(&self) -> Self {
        BigComplex {
            inner: self.inner.clone().ln(),
        }
    }

    /// Principal square root, argument in (−π/2, π/2].
    pub fn sqrt(&self) -> Self {
        BigComplex {
            inner: self.inner.clone().sqrt(),
        }
    }

    pub fn sin(&self) -> Self {
        BigComplex {
            inner: self.inner.clone().sin(),
        }
    }

    pub fn cos(&self) -> Self {
        BigComplex {
            inner: self.inner.clone().cos(),
        }
    }

    pub fn tan(&self) -> Self {
        BigComplex {
            inner: self.inner.clone().tan(),
        }
    }

    pub fn sinh(&self) -> Self {
        BigComplex {
            inner: self.inner.clone().sinh(),
        }
    }

    pub fn cosh(&self) -> Self {
        BigComplex {
            inner: self.inner.clone().cosh(),
        }
    }

    pub fn powi(&self, n: i32) -> Self {
        BigComplex {
            inner: self.inner.clone().pow(n),
        }
    }

    /// Principal power `exp(e · log self)`.
    pub fn powc(&self, e: &BigComplex) -> Self {
        let prec = self.prec().min(e.prec());
        BigComplex {
            inner: Complex::with_val(prec, (&self.inner).pow(&e.inner)),
        }
    }

    pub fn scale(&self, k: f64) -> Self {
        BigComplex {
            inner: Complex::with_val(self.prec(), &self.inner * k),
        }
    }

    pub fn scale_float(&self, k: &Float) -> Self {
        let prec = self.prec().min(k.prec());
        BigComplex {
            inner: Complex::with_val(prec, &self.inner * k),
        }
    }

    pub fn add_real(&self, k: f64) -> Self {
        BigComplex {
            inner: Complex::with_val(self.prec(), &self.inner + k),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.inner.real().is_finite() && self.inner.imag().is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.inner.real().is_zero() && self.inner.imag().is_zero()
    }

    /// Decimal strings for both parts, `digits` significant digits each.
    pub fn to_decimal_strings(&self, digits: usize) -> (String, String) {
        (
            float_to_decimal(self.inner.real(), digits),
            float_to_decimal(self.inner.imag(), digits),
        )
    }
}

/// Scientific-notation decimal rendering with a fixed number of significant digits.
pub fn float_to_decimal(x: &Float, digits: usize) -> String {
    x.to_string_radix(10, Some(digits))
}

/// `π` at the given precision.
pub fn pi(prec: u32) -> Float {
    Float::with_val(clamp_prec(prec), Constant::Pi)
}

/// Relative distance `|a − b| / max(1, |b|)` used by every comparison in the crate.
pub fn rel_dist(a: &BigComplex, b: &BigComplex) -> f64 {
    let prec = a.prec().max(b.prec());
    let diff = Complex::with_val(prec, a.as_complex() - b.as_complex());
    let d = Float::with_val(prec, diff.abs_ref());
    let s = Float::with_val(prec, b.as_complex().abs_ref());
    let denom = if s < 1 { Float::with_val(prec, 1) } else { s };
    (d / denom).to_f64()
}

/// `|a − b| / |b|`, infinite when `b` vanishes and `a` does not.
pub fn rel_err(a: &BigComplex, b: &BigComplex) -> f64 {
    let prec = a.prec().max(b.prec());
    let diff = Complex::with_val(prec, a.as_complex() - b.as_complex());
    let d = Float::with_val(prec, diff.abs_ref());
    let s = Float::with_val(prec, b.as_complex().abs_ref());
    if s.is_zero() {
        return if d.is_zero() { 0.0 } else { f64::INFINITY };
    }
    (d / s).to_f64()
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        let (re, im) = self.to_decimal_strings(digits);
        write!(f, "({re}, {im})")
    }
}

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex { inner: -self.inner }
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex {
            inner: -self.inner.clone(),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&BigComplex> for &BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: &BigComplex) -> BigComplex {
                let prec = self.prec().min(rhs.prec());
                BigComplex {
                    inner: Complex::with_val(prec, &self.inner $op &rhs.inner),
                }
            }
        }
        impl $tr<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: BigComplex) -> BigComplex {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: &BigComplex) -> BigComplex {
                (&self).$method(rhs)
            }
        }
        impl $tr<BigComplex> for &BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: BigComplex) -> BigComplex {
                self.$method(&rhs)
            }
        }
        impl $tr<f64> for &BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: f64) -> BigComplex {
                BigComplex {
                    inner: Complex::with_val(self.prec(), &self.inner $op rhs),
                }
            }
        }
        impl $tr<f64> for BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: f64) -> BigComplex {
                (&self).$method(rhs)
            }
        }
        impl $tr<&Float> for &BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: &Float) -> BigComplex {
                let prec = self.prec().min(rhs.prec());
                BigComplex {
                    inner: Complex::with_val(prec, &self.inner $op rhs),
                }
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl std::iter::Sum for BigComplex {
    fn sum<I: Iterator<Item = BigComplex>>(mut iter: I) -> BigComplex {
        let first = match iter.next() {
            Some(x) => x,
            None => return BigComplex::zero(MIN_PREC_BITS),
        };
        iter.fold(first, |acc, x| acc + x)
    }
}

/// Tolerance and precision bounds for [`adaptive_eval`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalRequest {
    pub target_rel_tol: f64,
    pub initial_prec_bits: u32,
    pub max_prec_bits: u32,
}

impl EvalRequest {
    pub fn new(target_rel_tol: f64, initial_prec_bits: u32, max_prec_bits: u32) -> Result<Self> {
        if !(target_rel_tol > 0.0 && target_rel_tol.is_finite()) {
            return Err(Error::Arg(format!("target_rel_tol must be positive, got {target_rel_tol}")));
        }
        if initial_prec_bits < MIN_PREC_BITS {
            return Err(Error::Arg(format!(
                "initial precision {initial_prec_bits} below {MIN_PREC_BITS} bits"
            )));
        }
        if initial_prec_bits > max_prec_bits {
            return Err(Error::Arg(format!(
                "initial precision {initial_prec_bits} exceeds maximum {max_prec_bits}"
            )));
        }
        Ok(EvalRequest {
            target_rel_tol,
            initial_prec_bits,
            max_prec_bits,
        })
    }

    /// Request for an `N`-dependent computation: starts at `initial` bits and may
    /// escalate to `1 + 8N` bits (never less than three doublings above `initial`).
    pub fn for_color(target_rel_tol: f64, initial: u32, n: u32) -> Result<Self> {
        let cap = (1 + 8 * n as u64).max(8 * initial as u64).min(u32::MAX as u64) as u32;
        Self::new(target_rel_tol, initial, cap)
    }
}

/// Evaluates `f` at doubling precisions until two consecutive levels agree.
///
/// Returns `f(2p)` for the first `p` with `|f(p) − f(2p)| ≤ tol·|f(2p)|`; the
/// returned value carries `2p` as its precision.
pub fn adaptive_eval<F>(req: &EvalRequest, mut f: F) -> Result<BigComplex>
where
    F: FnMut(u32) -> Result<BigComplex>,
{
    let mut p = req.initial_prec_bits;
    let mut lo = f(p)?;
    let mut last = f64::INFINITY;
    while p.checked_mul(2).is_some_and(|q| q <= req.max_prec_bits) {
        let hi = f(2 * p)?;
        let prec = hi.prec();
        let diff = Complex::with_val(prec, lo.as_complex() - hi.as_complex());
        let d = Float::with_val(prec, diff.abs_ref());
        let scale = hi.abs();
        let bound = Float::with_val(prec, &scale * req.target_rel_tol);
        if d <= bound {
            return Ok(hi);
        }
        last = if scale.is_zero() {
            f64::INFINITY
        } else {
            (d / scale).to_f64()
        };
        lo = hi;
        p *= 2;
    }
    Err(Error::PrecisionExhausted {
        max_prec_bits: req.max_prec_bits,
        last_rel_change: last,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_takes_min_precision() {
        let a = BigComplex::new(200, 1.5, -2.0);
        let b = BigComplex::new(100, 0.25, 3.0);
        assert_eq!((&a + &b).prec(), 100);
        assert_eq!((&a * &b).prec(), 100);
        assert_eq!((&b / &a).prec(), 100);
        assert_eq!(BigComplex::new(10, 1.0, 0.0).prec(), MIN_PREC_BITS);
    }

    #[test]
    fn multiplication_commutes_exactly() {
        let a = BigComplex::new(256, 0.123456789, -7.5);
        let b = BigComplex::new(256, -3.25, 1e-3);
        let ab = &a * &b;
        let ba = &b * &a;
        assert_eq!(ab, ba);
        let ratio = &ab / &ba;
        assert!(rel_dist(&ratio, &BigComplex::one(256)) == 0.0);
    }

    #[test]
    fn constant_stabilises_at_initial_precision() {
        let req = EvalRequest::new(1e-20, 128, 1024).unwrap();
        let mut calls = Vec::new();
        let v = adaptive_eval(&req, |p| {
            calls.push(p);
            Ok(BigComplex::one(p))
        })
        .unwrap();
        assert_eq!(calls, vec![128, 256]);
        assert_eq!(v.prec(), 256);
        assert_eq!(rel_dist(&v, &BigComplex::one(256)), 0.0);
    }

    #[test]
    fn geometric_sum_to_thirty_digits() {
        let req = EvalRequest::new(1e-30, 128, 1024).unwrap();
        let v = adaptive_eval(&req, |p| {
            let mut s = Float::new(p);
            let mut t = Float::with_val(p, 1);
            for _ in 0..=10 {
                s += &t;
                t /= 10;
            }
            Ok(BigComplex::from_float(s))
        })
        .unwrap();
        // (10^11 - 1) / (9 * 10^10)
        let exact = Float::with_val(512, 99_999_999_999u64) / Float::with_val(512, 90_000_000_000u64);
        let exact = BigComplex::from_float(exact);
        assert!(rel_dist(&v, &exact) < 1e-30);
    }

    #[test]
    fn exhaustion_is_reported() {
        let req = EvalRequest::new(1e-10, 64, 256).unwrap();
        let err = adaptive_eval(&req, |p| Ok(BigComplex::new(p, p as f64, 0.0))).unwrap_err();
        assert!(matches!(err, Error::PrecisionExhausted { max_prec_bits: 256, .. }));
    }

    #[test]
    fn request_invariants() {
        assert!(EvalRequest::new(1e-10, 256, 128).is_err());
        assert!(EvalRequest::new(0.0, 128, 256).is_err());
        assert!(EvalRequest::new(1e-10, 32, 256).is_err());
        let r = EvalRequest::for_color(1e-30, 128, 400).unwrap();
        assert_eq!(r.max_prec_bits, 3201);
        let r = EvalRequest::for_color(1e-30, 128, 1).unwrap();
        assert_eq!(r.max_prec_bits, 1024);
    }

    #[test]
    fn parse_and_render_round_trip() {
        let z = BigComplex::new(200, 1.0 / 3.0, -2.5e-7);
        let (re, im) = z.to_decimal_strings(40);
        let back = BigComplex::parse(200, &re, &im).unwrap();
        assert!(rel_dist(&back, &z) < 1e-38);
    }

    #[test]
    fn principal_branches() {
        let m1 = BigComplex::new(128, -1.0, 0.0);
        let l = m1.ln();
        assert!((l.im_f64() - std::f64::consts::PI).abs() < 1e-15);
        let s = BigComplex::new(128, -4.0, 0.0).sqrt();
        assert!((s.im_f64() - 2.0).abs() < 1e-15 && s.re_f64().abs() < 1e-30);
    }
}
