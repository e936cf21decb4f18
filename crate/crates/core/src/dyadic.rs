//! Exact dyadic and rational numbers.
//!
//! Every point the group F touches is handled exactly. Dyadic values `a/2^n`
//! are kept fully reduced so that equal values share one representation, which
//! lets them serve directly as hash keys during orbit enumeration.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A dyadic rational `numerator / 2^exponent` in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    pub fn new(num: impl Into<BigInt>, exp: u32) -> Self {
        let mut d = Dyadic {
            num: num.into(),
            exp,
        };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic {
            num: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            num: BigInt::one(),
            exp: 0,
        }
    }

    /// `1 / 2^k`
    pub fn pow2_recip(k: u32) -> Self {
        Dyadic {
            num: BigInt::one(),
            exp: k,
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0);
        let shift = tz.min(u64::from(self.exp)) as u32;
        if shift > 0 {
            self.num >>= shift as usize;
            self.exp -= shift;
        }
    }

    /// Multiplies by `2^k`; negative `k` divides.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Dyadic::zero();
        }
        if k >= 0 {
            let k = k as u64;
            if u64::from(self.exp) >= k {
                Dyadic {
                    num: self.num.clone(),
                    exp: self.exp - k as u32,
                }
            } else {
                Dyadic {
                    num: &self.num << (k - u64::from(self.exp)) as usize,
                    exp: 0,
                }
            }
        } else {
            let exp = u64::from(self.exp) + k.unsigned_abs();
            Dyadic::new(
                self.num.clone(),
                u32::try_from(exp).expect("dyadic exponent overflow"),
            )
        }
    }

    pub fn halve(&self, k: u32) -> Self {
        self.mul_pow2(-i64::from(k))
    }

    pub fn double(&self, k: u32) -> Self {
        self.mul_pow2(i64::from(k))
    }

    /// Numerators of `self` and `other` over the common denominator `2^max(exp)`.
    fn aligned(&self, other: &Dyadic) -> (BigInt, BigInt, u32) {
        let e = self.exp.max(other.exp);
        let a = &self.num << (e - self.exp) as usize;
        let b = &other.num << (e - other.exp) as usize;
        (a, b, e)
    }

    pub fn to_rational(&self) -> Rational {
        Rational(BigRational::new(
            self.num.clone(),
            BigInt::one() << self.exp as usize,
        ))
    }

    pub fn to_f64(&self) -> f64 {
        scaled_to_f64(&self.num, -i64::from(self.exp))
    }

    /// Midpoint of two dyadics.
    pub fn midpoint(&self, other: &Dyadic) -> Dyadic {
        (self + other).halve(1)
    }

    /// The dyadic with the smallest denominator strictly between `lo` and `hi`.
    /// Ties among equal denominators go to the smallest value.
    pub fn simplest_between(lo: &Dyadic, hi: &Dyadic) -> Option<Dyadic> {
        if lo >= hi {
            return None;
        }
        let mut k = 0u32;
        loop {
            // smallest multiple of 2^-k strictly greater than lo
            let scaled = lo.double(k);
            let floor = scaled.num.div_floor(&(BigInt::one() << scaled.exp as usize));
            let candidate = Dyadic::new(floor + 1, k);
            if &candidate < hi {
                return Some(candidate);
            }
            k += 1;
        }
    }
}

fn scaled_to_f64(num: &BigInt, mut pow: i64) -> f64 {
    let bits = num.bits();
    let mantissa = if bits > 62 {
        let shift = bits - 62;
        pow += shift as i64;
        (num >> shift as usize).to_f64().unwrap_or(f64::NAN)
    } else {
        num.to_f64().unwrap_or(f64::NAN)
    };
    let pow = pow.clamp(-2000, 2000) as i32;
    mantissa * 2f64.powi(pow)
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::zero()
    }
}

impl From<i64> for Dyadic {
    fn from(n: i64) -> Self {
        Dyadic::new(n, 0)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a - b, e)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(
            &self.num * &rhs.num,
            self.exp.checked_add(rhs.exp).expect("dyadic exponent overflow"),
        )
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -&self.num,
            exp: self.exp,
        }
    }
}

macro_rules! forward_owned {
    ($ty:ty, $($tr:ident :: $m:ident),*) => {$(
        impl $tr for $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Dyadic, Add::add, Sub::sub, Mul::mul);

/// Plain fractions up to denominator 2^32, `a/2^n` beyond that.
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exp {
            0 => write!(f, "{}", self.num),
            1..=32 => write!(f, "{}/{}", self.num, 1u64 << self.exp),
            _ => write!(f, "{}/2^{}", self.num, self.exp),
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Dyadic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<Point>()? {
            Point::Dyadic(d) => Ok(d),
            Point::Rational(_) => Err(Error::ParseNumber {
                input: s.to_string(),
                reason: "denominator is not a power of two".into(),
            }),
        }
    }
}

/// A rational number in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::ParseNumber {
                input: "?/0".into(),
                reason: "zero denominator".into(),
            });
        }
        Ok(Rational(BigRational::new(num.into(), den)))
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    /// Some(d) when the denominator is a power of two.
    pub fn to_dyadic(&self) -> Option<Dyadic> {
        let den = self.0.denom();
        let tz = den.trailing_zeros().unwrap_or(0);
        if (den >> tz as usize).is_one() {
            Some(Dyadic::new(self.0.numer().clone(), tz as u32))
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn cmp_dyadic(&self, d: &Dyadic) -> Ordering {
        let lhs = self.0.numer() << d.exp as usize;
        let rhs = &d.num * self.0.denom();
        lhs.cmp(&rhs)
    }

    fn add_dyadic(&self, d: &Dyadic) -> Rational {
        Rational(&self.0 + d.to_rational().0)
    }

    fn mul_pow2(&self, k: i64) -> Rational {
        let p = BigInt::one() << k.unsigned_abs() as usize;
        if k >= 0 {
            Rational(&self.0 * BigRational::from_integer(p))
        } else {
            Rational(&self.0 / BigRational::from_integer(p))
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.parse::<Point>()? {
            Point::Dyadic(d) => d.to_rational(),
            Point::Rational(r) => r,
        })
    }
}

/// A point of the unit interval (or any rational), stored dyadically whenever
/// possible. `Rational` only ever holds values whose reduced denominator is not
/// a power of two, so the representation is unique.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Point {
    Dyadic(Dyadic),
    Rational(Rational),
}

impl Point {
    pub fn from_rational(r: Rational) -> Self {
        match r.to_dyadic() {
            Some(d) => Point::Dyadic(d),
            None => Point::Rational(r),
        }
    }

    pub fn is_dyadic(&self) -> bool {
        matches!(self, Point::Dyadic(_))
    }

    pub fn as_dyadic(&self) -> Option<&Dyadic> {
        match self {
            Point::Dyadic(d) => Some(d),
            Point::Rational(_) => None,
        }
    }

    pub fn to_rational(&self) -> Rational {
        match self {
            Point::Dyadic(d) => d.to_rational(),
            Point::Rational(r) => r.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Point::Dyadic(d) => d.to_f64(),
            Point::Rational(r) => r.to_f64(),
        }
    }

    /// True when `0 < self < 1`.
    pub fn in_open_unit(&self) -> bool {
        self.cmp_dyadic(&Dyadic::zero()) == Ordering::Greater
            && self.cmp_dyadic(&Dyadic::one()) == Ordering::Less
    }

    pub fn in_closed_unit(&self) -> bool {
        self.cmp_dyadic(&Dyadic::zero()) != Ordering::Less
            && self.cmp_dyadic(&Dyadic::one()) != Ordering::Greater
    }
}

impl From<Dyadic> for Point {
    fn from(d: Dyadic) -> Self {
        Point::Dyadic(d)
    }
}

impl From<Rational> for Point {
    fn from(r: Rational) -> Self {
        Point::from_rational(r)
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Point::Dyadic(a), Point::Dyadic(b)) => a.cmp(b),
            (Point::Rational(a), Point::Dyadic(b)) => a.cmp_dyadic(b),
            (Point::Dyadic(a), Point::Rational(b)) => b.cmp_dyadic(a).reverse(),
            (Point::Rational(a), Point::Rational(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Dyadic(d) => d.fmt(f),
            Point::Rational(r) => r.fmt(f),
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(s: &str, whole: &str) -> Result<BigInt> {
    s.trim().parse::<BigInt>().map_err(|_| Error::ParseNumber {
        input: whole.to_string(),
        reason: format!("{s:?} is not an integer"),
    })
}

impl FromStr for Point {
    type Err = Error;

    /// Accepts `a`, `a/2^n` and `p/q`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.contains(['.', 'e', 'E']) {
            return Err(Error::ParseNumber {
                input: s.to_string(),
                reason: "floating-point literals are not accepted; all points are exact, \
                         write them as p/q or a/2^n"
                    .into(),
            });
        }
        let Some((num, den)) = t.split_once('/') else {
            return Ok(Point::Dyadic(Dyadic::new(parse_int(t, s)?, 0)));
        };
        let num = parse_int(num, s)?;
        let den = den.trim();
        if let Some(exp) = den.strip_prefix("2^") {
            let exp: u32 = exp.trim().parse().map_err(|_| Error::ParseNumber {
                input: s.to_string(),
                reason: format!("{exp:?} is not a valid exponent"),
            })?;
            return Ok(Point::Dyadic(Dyadic::new(num, exp)));
        }
        let den = parse_int(den, s)?;
        if den.is_zero() {
            return Err(Error::ParseNumber {
                input: s.to_string(),
                reason: "zero denominator".into(),
            });
        }
        if den.is_negative() {
            return Ok(Point::from_rational(Rational::new(-num, -den)?));
        }
        Ok(Point::from_rational(Rational::new(num, den)?))
    }
}

/// Scalars a PL map can be evaluated on.
pub trait Scalar: Clone + Eq + fmt::Display {
    fn cmp_dyadic(&self, d: &Dyadic) -> Ordering;
    fn add_dyadic(&self, d: &Dyadic) -> Self;
    fn sub_dyadic(&self, d: &Dyadic) -> Self {
        self.add_dyadic(&-d)
    }
    fn mul_pow2(&self, k: i64) -> Self;
}

impl Scalar for Dyadic {
    fn cmp_dyadic(&self, d: &Dyadic) -> Ordering {
        self.cmp(d)
    }
    fn add_dyadic(&self, d: &Dyadic) -> Self {
        self + d
    }
    fn mul_pow2(&self, k: i64) -> Self {
        Dyadic::mul_pow2(self, k)
    }
}

impl Scalar for Rational {
    fn cmp_dyadic(&self, d: &Dyadic) -> Ordering {
        Rational::cmp_dyadic(self, d)
    }
    fn add_dyadic(&self, d: &Dyadic) -> Self {
        Rational::add_dyadic(self, d)
    }
    fn mul_pow2(&self, k: i64) -> Self {
        Rational::mul_pow2(self, k)
    }
}

impl Scalar for Point {
    fn cmp_dyadic(&self, d: &Dyadic) -> Ordering {
        match self {
            Point::Dyadic(a) => a.cmp(d),
            Point::Rational(r) => r.cmp_dyadic(d),
        }
    }
    fn add_dyadic(&self, d: &Dyadic) -> Self {
        match self {
            Point::Dyadic(a) => Point::Dyadic(a + d),
            // adding a dyadic never turns a non-dyadic rational into a dyadic one
            Point::Rational(r) => Point::Rational(r.add_dyadic(d)),
        }
    }
    fn mul_pow2(&self, k: i64) -> Self {
        match self {
            Point::Dyadic(a) => Point::Dyadic(a.mul_pow2(k)),
            Point::Rational(r) => Point::Rational(r.mul_pow2(k)),
        }
    }
}

macro_rules! string_serde {
    ($($ty:ty),*) => {$(
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }
        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    )*};
}
string_serde!(Dyadic, Rational, Point);

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn p(s: &str) -> Point {
        s.parse().unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(&d("1/2") + &d("1/4"), d("3/4"));
        assert_eq!(&d("1/2") - &d("1/2"), Dyadic::zero());
        assert_eq!(&d("3/8") * &Dyadic::from(2), d("3/4"));
    }

    #[test]
    fn halve_and_double() {
        assert_eq!(d("1/2").halve(1), d("1/4"));
        assert_eq!(d("3/8").double(1), d("3/4"));
        assert_eq!(Dyadic::zero().halve(5), Dyadic::zero());
        assert_eq!(d("3").double(3), d("24"));
        assert_eq!(d("24").halve(3), d("3"));
    }

    #[test]
    fn compare_examples() {
        assert_eq!(p("1/2").cmp(&p("9/16")), Ordering::Less);
        assert_eq!(p("3/4").cmp(&p("3/4")), Ordering::Equal);
        assert_eq!(p("1/3").cmp(&p("1/4")), Ordering::Greater);
        assert_eq!(p("1/4").cmp(&p("1/3")), Ordering::Less);
    }

    #[test]
    fn canonical_form() {
        let x = Dyadic::new(12, 4);
        assert_eq!(x.numerator(), &BigInt::from(3));
        assert_eq!(x.exponent(), 2);
        assert_eq!(Dyadic::new(0, 9).exponent(), 0);
        assert_eq!(x.to_string(), "3/4");
        assert_eq!(Dyadic::new(1, 40).to_string(), "1/2^40");
        assert_eq!(Dyadic::new(-5, 32).to_string(), "-5/4294967296");
    }

    #[test]
    fn parsing_forms() {
        assert_eq!(p("3/4"), p("3/2^2"));
        assert!(p("3/4").is_dyadic());
        assert!(!p("1/3").is_dyadic());
        assert_eq!(p("2/6"), p("1/3"));
        assert_eq!(p("1/-3"), p("-1/3"));
        assert!("0.5".parse::<Point>().is_err());
        assert!("1/0".parse::<Point>().is_err());
        assert!("x/2".parse::<Point>().is_err());
        assert!("1/3".parse::<Dyadic>().is_err());
        assert_eq!(p("1/3").to_string(), "1/3");
        assert_eq!(p("6/8").to_string(), "3/4");
        assert_eq!(p("1/2^40").to_string().parse::<Point>().unwrap(), p("1/2^40"));
    }

    #[test]
    fn simplest_between_picks_small_denominators() {
        assert_eq!(Dyadic::simplest_between(&d("5/16"), &d("9/16")), Some(d("1/2")));
        assert_eq!(Dyadic::simplest_between(&d("1/4"), &d("1/2")), Some(d("3/8")));
        assert_eq!(Dyadic::simplest_between(&d("-3/8"), &d("-1/4")), Some(d("-5/16")));
        assert_eq!(Dyadic::simplest_between(&d("1/2"), &d("1/2")), None);
    }

    #[test]
    fn point_scalar_stays_non_dyadic() {
        let third = p("1/3");
        let moved = third.add_dyadic(&d("1/4")).mul_pow2(-3);
        assert!(!moved.is_dyadic());
        assert_eq!(moved, p("7/96"));
    }

    #[test]
    fn to_f64_handles_large_numerators() {
        let big = Dyadic::new(BigInt::from(3) << 200usize, 202);
        assert_eq!(big.to_f64(), 0.75);
    }
}
