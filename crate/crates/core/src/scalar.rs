//! Exact rational scalars.
//!
//! Values whose numerator and denominator fit in an `i64` are kept inline and
//! combined through `i128` intermediates; anything larger is promoted to a
//! [`BigRational`]. The representation is canonical (lowest terms, positive
//! denominator, inline whenever it fits), so derived equality and hashing are
//! value equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("cannot parse {0:?} as a rational number")]
    Malformed(String),
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small { num: i64, den: i64 },
    Big(BigRational),
}

/// An exact rational number.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar(Repr);

impl Scalar {
    pub fn zero() -> Self {
        Scalar::from(0)
    }

    pub fn one() -> Self {
        Scalar::from(1)
    }

    /// Builds `num / den`, reducing to lowest terms.
    pub fn new(num: i64, den: i64) -> Result<Self, ScalarError> {
        if den == 0 {
            return Err(ScalarError::ZeroDenominator);
        }
        Ok(Self::from_i128(num as i128, den as i128))
    }

    /// Builds `num / den` from arbitrary-precision parts.
    pub fn from_big(num: BigInt, den: BigInt) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::ZeroDenominator);
        }
        Ok(Self::from_ratio(BigRational::new(num, den)))
    }

    fn from_i128(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(num), Ok(den)) => Scalar(Repr::Small { num, den }),
            _ => Scalar(Repr::Big(BigRational::new(BigInt::from(n), BigInt::from(d)))),
        }
    }

    fn from_ratio(r: BigRational) -> Self {
        // BigRational::new already reduced and made the denominator positive.
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(num), Some(den)) => Scalar(Repr::Small { num, den }),
            _ => Scalar(Repr::Big(r)),
        }
    }

    fn to_ratio(&self) -> BigRational {
        match &self.0 {
            Repr::Small { num, den } => {
                BigRational::new_raw(BigInt::from(*num), BigInt::from(*den))
            }
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small { num, .. } => BigInt::from(*num),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small { den, .. } => BigInt::from(*den),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small { den, .. } => *den == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small { num: 0, .. })
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small { num, .. } => *num > 0,
            Repr::Big(r) => r.is_positive(),
        }
    }

    /// Smallest integer not below `self`.
    pub fn ceil(&self) -> Scalar {
        match &self.0 {
            Repr::Small { num, den } => {
                Scalar::from_i128(-Integer::div_floor(&-(*num as i128), &(*den as i128)), 1)
            }
            Repr::Big(r) => Scalar::from_ratio(r.ceil()),
        }
    }

    /// Largest integer not above `self`.
    pub fn floor(&self) -> Scalar {
        match &self.0 {
            Repr::Small { num, den } => {
                Scalar::from_i128(Integer::div_floor(&(*num as i128), &(*den as i128)), 1)
            }
            Repr::Big(r) => Scalar::from_ratio(r.floor()),
        }
    }

    /// The value as an `i64` if it is an integer in range.
    pub fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small { num, den: 1 } => Some(*num),
            _ => None,
        }
    }

    /// Nearest `f64`; only meant for display and rendering.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small { num, den } => *num as f64 / *den as f64,
            Repr::Big(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn abs(&self) -> Scalar {
        if self < &Scalar::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        if rhs.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(div_ref(self, rhs))
    }

    pub fn min_of<'a>(a: &'a Scalar, b: &'a Scalar) -> &'a Scalar {
        if b < a {
            b
        } else {
            a
        }
    }

    pub fn max_of<'a>(a: &'a Scalar, b: &'a Scalar) -> &'a Scalar {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar(Repr::Small { num: v, den: 1 })
    }
}

impl From<i32> for Scalar {
    fn from(v: i32) -> Self {
        Scalar::from(v as i64)
    }
}

impl From<u32> for Scalar {
    fn from(v: u32) -> Self {
        Scalar::from(v as i64)
    }
}

impl From<usize> for Scalar {
    fn from(v: usize) -> Self {
        match i64::try_from(v) {
            Ok(v) => Scalar::from(v),
            Err(_) => Scalar::from_ratio(BigRational::from_integer(BigInt::from(v))),
        }
    }
}

impl From<BigInt> for Scalar {
    fn from(v: BigInt) -> Self {
        Scalar::from_ratio(BigRational::from_integer(v))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => {
                if b == d {
                    a.cmp(c)
                } else {
                    (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
                }
            }
            _ => self.to_ratio().cmp(&other.to_ratio()),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn add_ref(lhs: &Scalar, rhs: &Scalar) -> Scalar {
    match (&lhs.0, &rhs.0) {
        (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => {
            if b == d {
                Scalar::from_i128(*a as i128 + *c as i128, *b as i128)
            } else {
                Scalar::from_i128(
                    *a as i128 * *d as i128 + *c as i128 * *b as i128,
                    *b as i128 * *d as i128,
                )
            }
        }
        _ => Scalar::from_ratio(lhs.to_ratio() + rhs.to_ratio()),
    }
}

fn mul_ref(lhs: &Scalar, rhs: &Scalar) -> Scalar {
    match (&lhs.0, &rhs.0) {
        (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => {
            Scalar::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
        }
        _ => Scalar::from_ratio(lhs.to_ratio() * rhs.to_ratio()),
    }
}

fn div_ref(lhs: &Scalar, rhs: &Scalar) -> Scalar {
    assert!(!rhs.is_zero(), "division by zero");
    match (&lhs.0, &rhs.0) {
        (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => {
            Scalar::from_i128(*a as i128 * *d as i128, *b as i128 * *c as i128)
        }
        _ => Scalar::from_ratio(lhs.to_ratio() / rhs.to_ratio()),
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self.0 {
            Repr::Small { num, den } => Scalar::from_i128(-(num as i128), den as i128),
            Repr::Big(r) => Scalar::from_ratio(-r),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $f:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                $f(self, rhs)
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                $f(&self, &rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                $f(&self, rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                $f(self, &rhs)
            }
        }
    };
}

fn sub_ref(lhs: &Scalar, rhs: &Scalar) -> Scalar {
    add_ref(lhs, &-rhs.clone())
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);
forward_binop!(Div, div, div_ref);

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small { num, den: 1 } => write!(f, "{num}"),
            Repr::Small { num, den } => write!(f, "{num}/{den}"),
            Repr::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Accepts `p`, `p/q` and plain decimals such as `2.5`.
impl FromStr for Scalar {
    type Err = ScalarError;

    fn from_str(raw: &str) -> Result<Self, Self::Err> {
        let s = raw.trim();
        let bad = || ScalarError::Malformed(raw.to_string());
        if let Some((p, q)) = s.split_once('/') {
            let p = parse_int(p.trim()).ok_or_else(bad)?;
            let q = parse_int(q.trim()).ok_or_else(bad)?;
            if q.is_zero() {
                return Err(ScalarError::ZeroDenominator);
            }
            if q.is_negative() {
                return Err(bad());
            }
            return Scalar::from_big(p, q);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = int.starts_with('-');
            let int = if int.is_empty() || int == "-" || int == "+" {
                BigInt::zero()
            } else {
                parse_int(int).ok_or_else(bad)?
            };
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            let frac: BigInt = frac.parse().map_err(|_| bad())?;
            let mag = int.abs() * &scale + frac;
            let num = if negative { -mag } else { mag };
            return Scalar::from_big(num, scale);
        }
        parse_int(s).map(Scalar::from).ok_or_else(bad)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.to_i64() {
            Some(v) => serializer.serialize_i64(v),
            None => serializer.serialize_str(&self.to_string()),
        }
    }
}

struct ScalarVisitor;

impl<'de> Visitor<'de> for ScalarVisitor {
    type Value = Scalar;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a \"p/q\" string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Scalar, E> {
        Ok(Scalar::from(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Scalar, E> {
        Ok(Scalar::from(BigInt::from(v)))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Scalar, E> {
        if !v.is_finite() {
            return Err(E::custom("non-finite number"));
        }
        // Shortest round-trip text is what the author wrote for ordinary decimals.
        let text = v.to_string();
        text.parse().map_err(E::custom)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Scalar, E> {
        v.parse().map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Scalar, D::Error> {
        deserializer.deserialize_any(ScalarVisitor)
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::one()
    }
}
