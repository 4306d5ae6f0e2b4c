//! Exact real numbers: reduced rationals and quadratic surds `a + b·√d`.
//!
//! Every comparison is decided with integer arithmetic. Floating-point values
//! are only produced on request (`to_f64`, `ln`) and never feed back into a
//! decision.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `a + b·√d` with `b ≠ 0` and `d > 1` square-free (up to the trial-division
/// limit used by [`squarefree_split`]).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    a: BigRational,
    b: BigRational,
    d: BigInt,
}

impl QuadSurd {
    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }
}

/// An exact real number.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExactReal {
    Rational(BigRational),
    Surd(QuadSurd),
}

const TRIAL_LIMIT: u64 = 100_000;

/// Splits `n > 0` into `(f, r)` with `n = f²·r` and `r` free of squared primes
/// below the trial limit. The remainder is also tested for being a perfect
/// square, which settles every `n` below `TRIAL_LIMIT³`.
pub fn squarefree_split(n: &BigInt) -> (BigInt, BigInt) {
    assert!(n.is_positive(), "squarefree_split needs a positive argument");
    let mut rest = n.clone();
    let mut f = BigInt::one();
    let mut keep = BigInt::one();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT {
        let pb = BigInt::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut e = 0u32;
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            e += 1;
        }
        f *= num_traits::pow(pb.clone(), (e / 2) as usize);
        if e % 2 == 1 {
            keep *= &pb;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let s = rest.sqrt();
    if &s * &s == rest {
        f *= s;
        rest = BigInt::one();
    }
    (f, keep * rest)
}

fn ratio(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), d.into())
}

impl ExactReal {
    pub fn zero() -> Self {
        ExactReal::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactReal::Rational(BigRational::one())
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        ExactReal::Rational(BigRational::from_integer(n.into()))
    }

    /// `p/q`, reduced. Panics if `q == 0`.
    pub fn ratio(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Self {
        ExactReal::Rational(ratio(p, q))
    }

    pub fn from_rational(r: BigRational) -> Self {
        ExactReal::Rational(r)
    }

    /// `a + b·√d`, normalized: square factors of `d` move into `b`, and the
    /// result collapses to a rational when the irrational part vanishes.
    pub fn surd(a: BigRational, b: BigRational, d: impl Into<BigInt>) -> Result<Self> {
        let d = d.into();
        if d.is_negative() {
            return Err(Error::InvalidArgument(format!("negative radicand {d}")));
        }
        if b.is_zero() || d.is_zero() {
            return Ok(ExactReal::Rational(a));
        }
        let (f, r) = squarefree_split(&d);
        let b = b * BigRational::from_integer(f);
        if r.is_one() {
            return Ok(ExactReal::Rational(a + b));
        }
        Ok(ExactReal::Surd(QuadSurd { a, b, d: r }))
    }

    /// `√n` for a nonnegative integer `n`.
    pub fn sqrt_of(n: impl Into<BigInt>) -> Result<Self> {
        Self::surd(BigRational::zero(), BigRational::one(), n)
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, ExactReal::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExactReal::Rational(r) => Some(r),
            ExactReal::Surd(_) => None,
        }
    }

    /// Radicand of the field this number lives in, `None` for rationals.
    pub fn radicand(&self) -> Option<&BigInt> {
        match self {
            ExactReal::Rational(_) => None,
            ExactReal::Surd(s) => Some(&s.d),
        }
    }

    /// `(a, b, d)` with `self = a + b·√d`; rationals report `b = 0`, `d = 0`.
    pub fn parts(&self) -> (BigRational, BigRational, BigInt) {
        match self {
            ExactReal::Rational(r) => (r.clone(), BigRational::zero(), BigInt::zero()),
            ExactReal::Surd(s) => (s.a.clone(), s.b.clone(), s.d.clone()),
        }
    }

    fn common_field(&self, other: &Self) -> Result<Option<BigInt>> {
        match (self.radicand(), other.radicand()) {
            (None, None) => Ok(None),
            (Some(d), None) | (None, Some(d)) => Ok(Some(d.clone())),
            (Some(d1), Some(d2)) if d1 == d2 => Ok(Some(d1.clone())),
            (Some(d1), Some(d2)) => Err(Error::FieldMismatch(d1.to_string(), d2.to_string())),
        }
    }

    fn build(a: BigRational, b: BigRational, d: Option<BigInt>) -> Self {
        match d {
            Some(d) if !b.is_zero() => ExactReal::Surd(QuadSurd { a, b, d }),
            _ => ExactReal::Rational(a),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let d = self.common_field(other)?;
        let (a1, b1, _) = self.parts();
        let (a2, b2, _) = other.parts();
        Ok(Self::build(a1 + a2, b1 + b2, d))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let d = self.common_field(other)?;
        let (a1, b1, _) = self.parts();
        let (a2, b2, _) = other.parts();
        let dd = BigRational::from_integer(d.clone().unwrap_or_default());
        let a = &a1 * &a2 + &b1 * &b2 * dd;
        let b = a1 * b2 + b1 * a2;
        Ok(Self::build(a, b, d))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.recip()?)
    }

    pub fn recip(&self) -> Result<Self> {
        match self {
            ExactReal::Rational(r) => {
                if r.is_zero() {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(ExactReal::Rational(r.recip()))
                }
            }
            ExactReal::Surd(s) => {
                // 1/(a + b√d) = (a − b√d)/(a² − b²d); the norm is nonzero for
                // square-free d > 1.
                let norm = &s.a * &s.a - &s.b * &s.b * BigRational::from_integer(s.d.clone());
                Ok(ExactReal::Surd(QuadSurd {
                    a: &s.a / &norm,
                    b: -&s.b / &norm,
                    d: s.d.clone(),
                }))
            }
        }
    }

    /// Sign of the number, decided exactly.
    pub fn signum(&self) -> Ordering {
        match self {
            ExactReal::Rational(r) => sign_ord(r.numer().sign()),
            ExactReal::Surd(s) => surd_sign(&s.a, &s.b, &s.d),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExactReal::Rational(r) if r.is_zero())
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self
        } else {
            self.clone()
        }
    }

    /// Exact comparison; `None` only when the operands live in different
    /// quadratic fields.
    pub fn try_cmp(&self, other: &Self) -> Option<Ordering> {
        self.checked_sub(other).ok().map(|d| d.signum())
    }

    /// Largest integer `≤ self`.
    pub fn floor(&self) -> BigInt {
        match self {
            ExactReal::Rational(r) => r.floor().to_integer(),
            ExactReal::Surd(_) => {
                let approx = self.to_f64();
                let mut f = if approx.is_finite() {
                    BigInt::from(approx.floor() as i128)
                } else {
                    BigInt::zero()
                };
                loop {
                    let fr = ExactReal::from_integer(f.clone());
                    if self.try_cmp(&fr) == Some(Ordering::Less) {
                        f -= 1;
                        continue;
                    }
                    let next = ExactReal::from_integer(&f + 1);
                    if self.try_cmp(&next) != Some(Ordering::Less) {
                        f += 1;
                        continue;
                    }
                    return f;
                }
            }
        }
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract(&self) -> Self {
        self - &ExactReal::from_integer(self.floor())
    }

    /// Nearest `f64`. Surds whose two parts nearly cancel are evaluated via
    /// the conjugate, so the relative error stays at rounding level.
    pub fn to_f64(&self) -> f64 {
        match self {
            ExactReal::Rational(r) => rational_to_f64(r),
            ExactReal::Surd(s) => {
                let sa = s.a.numer().sign();
                let sb = s.b.numer().sign();
                let root = big_sqrt_f64(&s.d);
                if sa == Sign::NoSign || sa == sb {
                    rational_to_f64(&s.a) + rational_to_f64(&s.b) * root
                } else {
                    let norm = &s.a * &s.a - &s.b * &s.b * BigRational::from_integer(s.d.clone());
                    let conj = rational_to_f64(&s.a) - rational_to_f64(&s.b) * root;
                    rational_to_f64(&norm) / conj
                }
            }
        }
    }

    /// Natural logarithm of `|self|`; robust for magnitudes far outside the
    /// `f64` range. Returns `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        match self {
            ExactReal::Rational(r) => ln_abs_rational(r),
            ExactReal::Surd(s) => {
                let sa = s.a.numer().sign();
                let sb = s.b.numer().sign();
                if sa == Sign::NoSign || sa == sb {
                    ln_abs_same_sign(&s.a, &s.b, &s.d)
                } else {
                    let norm = &s.a * &s.a - &s.b * &s.b * BigRational::from_integer(s.d.clone());
                    ln_abs_rational(&norm) - ln_abs_same_sign(&s.a, &s.b, &s.d)
                }
            }
        }
    }
}

fn sign_ord(s: Sign) -> Ordering {
    match s {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

/// Sign of `a + b·√d` for rationals `a`, `b` and `d > 0`.
pub(crate) fn surd_sign(a: &BigRational, b: &BigRational, d: &BigInt) -> Ordering {
    let sa = sign_ord(a.numer().sign());
    let sb = sign_ord(b.numer().sign());
    if sb == Ordering::Equal {
        return sa;
    }
    if sa == Ordering::Equal || sa == sb {
        return sb;
    }
    // opposite signs: compare a² with b²d
    let lhs = a * a;
    let rhs = b * b * BigRational::from_integer(d.clone());
    match lhs.cmp(&rhs) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => Ordering::Equal,
    }
}

fn big_sqrt_f64(d: &BigInt) -> f64 {
    d.to_f64().map(f64::sqrt).unwrap_or(f64::INFINITY)
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() && (v != 0.0 || r.is_zero()) {
            return v;
        }
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * ln_abs_rational(r).exp()
}

/// `ln|n|` for a big integer.
pub(crate) fn ln_abs_int(n: &BigInt) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap().ln();
    }
    let shift = bits - 60;
    let top: BigInt = n.abs() >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

pub(crate) fn ln_abs_rational(r: &BigRational) -> f64 {
    ln_abs_int(r.numer()) - ln_abs_int(r.denom())
}

/// `ln(|a| + |b|·√d)`.
fn ln_abs_same_sign(a: &BigRational, b: &BigRational, d: &BigInt) -> f64 {
    let la = ln_abs_rational(a);
    let lb = ln_abs_rational(b) + 0.5 * ln_abs_int(d);
    let (hi, lo) = if la > lb { (la, lb) } else { (lb, la) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

impl PartialOrd for ExactReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.try_cmp(other)
    }
}

impl Neg for &ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        match self {
            ExactReal::Rational(r) => ExactReal::Rational(-r),
            ExactReal::Surd(s) => ExactReal::Surd(QuadSurd {
                a: -&s.a,
                b: -&s.b,
                d: s.d.clone(),
            }),
        }
    }
}

impl Neg for ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        -&self
    }
}

// Arithmetic operators panic when the operands live in different quadratic
// fields; use the `checked_*` methods where that can happen.
macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&ExactReal> for &ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: &ExactReal) -> ExactReal {
                self.$checked(rhs)
                    .expect(concat!("ExactReal::", stringify!($method)))
            }
        }
        impl $tr<ExactReal> for ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: ExactReal) -> ExactReal {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&ExactReal> for ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: &ExactReal) -> ExactReal {
                (&self).$method(rhs)
            }
        }
        impl $tr<ExactReal> for &ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: ExactReal) -> ExactReal {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl From<BigRational> for ExactReal {
    fn from(r: BigRational) -> Self {
        ExactReal::Rational(r)
    }
}

impl From<i64> for ExactReal {
    fn from(n: i64) -> Self {
        ExactReal::from_integer(n)
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactReal::Rational(r) => write!(f, "{r}"),
            ExactReal::Surd(s) => {
                let mag = s.b.abs();
                let root = if mag.is_one() {
                    format!("sqrt({})", s.d)
                } else {
                    format!("{mag}*sqrt({})", s.d)
                };
                let sign = if s.b.is_negative() { "-" } else { "+" };
                if s.a.is_zero() {
                    write!(f, "{}{root}", if s.b.is_negative() { "-" } else { "" })
                } else {
                    write!(f, "{} {sign} {root}", s.a)
                }
            }
        }
    }
}

/// `p/q` as a reduced rational, for small literals in code and tests.
pub fn rat(p: i64, q: i64) -> BigRational {
    ratio(p, q)
}

/// Checks `n` is a perfect square.
pub fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let s = n.sqrt();
    &s * &s == *n
}

/// Greatest common divisor helper re-exported for callers building rationals.
pub fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2_minus_1() -> ExactReal {
        ExactReal::surd(rat(-1, 1), rat(1, 1), 2).unwrap()
    }

    #[test]
    fn squarefree_split_pulls_out_squares() {
        let (f, r) = squarefree_split(&BigInt::from(72));
        assert_eq!((f, r), (BigInt::from(6), BigInt::from(2)));
        let (f, r) = squarefree_split(&BigInt::from(49));
        assert_eq!((f, r), (BigInt::from(7), BigInt::from(1)));
        let (f, r) = squarefree_split(&BigInt::from(2 * 27 * 25));
        assert_eq!((f, r), (BigInt::from(15), BigInt::from(6)));
    }

    #[test]
    fn perfect_square_radicand_collapses() {
        let x = ExactReal::surd(rat(1, 2), rat(1, 3), 9).unwrap();
        assert_eq!(x, ExactReal::ratio(3, 2));
    }

    #[test]
    fn surd_field_arithmetic() {
        let t = sqrt2_minus_1();
        // (√2 − 1)(√2 + 1) = 1
        let u = &t + &ExactReal::from_integer(2);
        assert_eq!(&t * &u, ExactReal::one());
        // 1/(2 + t) = t
        assert_eq!((ExactReal::from_integer(2) + &t).recip().unwrap(), t);
    }

    #[test]
    fn exact_comparison_of_close_numbers() {
        // 3 − 2√2 ≈ 0.171573 sits between 70/408 and 29/169
        let x = ExactReal::surd(rat(3, 1), rat(-2, 1), 2).unwrap();
        assert_eq!(x.try_cmp(&ExactReal::ratio(1, 6)), Some(Ordering::Greater));
        assert_eq!(x.try_cmp(&ExactReal::ratio(29, 169)), Some(Ordering::Less));
        assert_eq!(x.try_cmp(&ExactReal::ratio(70, 408)), Some(Ordering::Greater));
        assert!(x.signum() == Ordering::Greater);
    }

    #[test]
    fn cancellation_safe_float_conversion() {
        // (√2 − 1)^40 has both parts near 1e15 with massive cancellation
        let t = sqrt2_minus_1();
        let mut p = ExactReal::one();
        for _ in 0..40 {
            p = &p * &t;
        }
        let expect = (2f64.sqrt() - 1.0).powi(40);
        assert!((p.to_f64() / expect - 1.0).abs() < 1e-12);
        assert!((p.ln_abs() - 40.0 * (2f64.sqrt() - 1.0).ln()).abs() < 1e-10);
    }

    #[test]
    fn floor_and_fract_of_surd() {
        let x = ExactReal::surd(rat(0, 1), rat(7, 1), 2).unwrap(); // 7√2 ≈ 9.899
        assert_eq!(x.floor(), BigInt::from(9));
        let f = x.fract();
        assert_eq!(f, ExactReal::surd(rat(-9, 1), rat(7, 1), 2).unwrap());
    }

    #[test]
    fn mismatched_fields_are_reported() {
        let a = ExactReal::sqrt_of(2).unwrap();
        let b = ExactReal::sqrt_of(3).unwrap();
        assert!(matches!(a.checked_add(&b), Err(Error::FieldMismatch(_, _))));
        assert_eq!(a.try_cmp(&b), None);
    }

    #[test]
    fn ln_of_huge_rationals() {
        let big = BigInt::one() << 5000u32;
        let r = ExactReal::from_rational(BigRational::new(BigInt::from(3), big));
        let expect = 3f64.ln() - 5000.0 * std::f64::consts::LN_2;
        assert!((r.ln_abs() - expect).abs() < 1e-9);
    }
}
