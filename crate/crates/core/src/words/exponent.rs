use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

/// Arbitrary-precision signed integer with an inline fast path.
///
/// Values that fit in an `i64` are always stored inline, so structural
/// equality and hashing agree with numeric equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Exponent(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(i64),
    Big(BigInt),
}

impl Exponent {
    pub const ZERO: Exponent = Exponent(Repr::Small(0));
    pub const ONE: Exponent = Exponent(Repr::Small(1));

    pub fn from_big(value: BigInt) -> Self {
        match value.to_i64() {
            Some(v) => Exponent(Repr::Small(v)),
            None => Exponent(Repr::Big(value)),
        }
    }

    pub fn to_big(&self) -> BigInt {
        match &self.0 {
            Repr::Small(v) => BigInt::from(*v),
            Repr::Big(b) => b.clone(),
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(v) => Some(*v),
            Repr::Big(_) => None,
        }
    }

    /// Magnitude as a `usize`, if it fits.
    pub fn magnitude_usize(&self) -> Option<usize> {
        match &self.0 {
            Repr::Small(v) => usize::try_from(v.unsigned_abs()).ok(),
            Repr::Big(_) => None,
        }
    }

    /// Magnitude as a `usize`, saturating.
    pub fn magnitude_saturating(&self) -> usize {
        self.magnitude_usize().unwrap_or(usize::MAX)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0))
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn signum(&self) -> i8 {
        match &self.0 {
            Repr::Small(v) => v.signum() as i8,
            Repr::Big(b) => {
                if b.is_negative() {
                    -1
                } else {
                    1
                }
            }
        }
    }

    pub fn abs(&self) -> Exponent {
        match &self.0 {
            Repr::Small(v) => match v.checked_abs() {
                Some(a) => Exponent(Repr::Small(a)),
                None => Exponent::from_big(BigInt::from(*v).abs()),
            },
            Repr::Big(b) => Exponent::from_big(b.abs()),
        }
    }

    /// Euclidean division (non-negative remainder) for a nonzero divisor.
    pub fn div_rem_euclid(&self, other: &Exponent) -> (Exponent, Exponent) {
        assert!(!other.is_zero(), "division by zero exponent");
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &other.0) {
            if let (Some(q), Some(_)) = (a.checked_div_euclid(*b), a.checked_rem_euclid(*b)) {
                return (Exponent::from(q), Exponent::from(a.rem_euclid(*b)));
            }
        }
        let (q, r) = self.to_big().div_mod_floor(&other.to_big().abs());
        let q = if other.is_negative() { -q } else { q };
        (Exponent::from_big(q), Exponent::from_big(r))
    }

    /// `Some(q)` when `other` divides `self` exactly.
    pub fn checked_exact_div(&self, other: &Exponent) -> Option<Exponent> {
        if other.is_zero() {
            return None;
        }
        let (q, r) = self.to_big().div_rem(&other.to_big());
        r.is_zero().then(|| Exponent::from_big(q))
    }

    pub fn min_abs<'a>(&'a self, other: &'a Exponent) -> &'a Exponent {
        if self.abs() <= other.abs() {
            self
        } else {
            other
        }
    }
}

impl Default for Exponent {
    fn default() -> Self {
        Exponent::ZERO
    }
}

impl From<i64> for Exponent {
    fn from(v: i64) -> Self {
        Exponent(Repr::Small(v))
    }
}

impl From<i32> for Exponent {
    fn from(v: i32) -> Self {
        Exponent(Repr::Small(v as i64))
    }
}

impl From<usize> for Exponent {
    fn from(v: usize) -> Self {
        match i64::try_from(v) {
            Ok(v) => Exponent(Repr::Small(v)),
            Err(_) => Exponent::from_big(BigInt::from(v)),
        }
    }
}

impl From<BigInt> for Exponent {
    fn from(v: BigInt) -> Self {
        Exponent::from_big(v)
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Exponent {
    type Output = Exponent;
    fn add(self, rhs: &Exponent) -> Exponent {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &rhs.0) {
            if let Some(s) = a.checked_add(*b) {
                return Exponent(Repr::Small(s));
            }
        }
        Exponent::from_big(self.to_big() + rhs.to_big())
    }
}

impl Sub for &Exponent {
    type Output = Exponent;
    fn sub(self, rhs: &Exponent) -> Exponent {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &rhs.0) {
            if let Some(s) = a.checked_sub(*b) {
                return Exponent(Repr::Small(s));
            }
        }
        Exponent::from_big(self.to_big() - rhs.to_big())
    }
}

impl Mul for &Exponent {
    type Output = Exponent;
    fn mul(self, rhs: &Exponent) -> Exponent {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &rhs.0) {
            if let Some(s) = a.checked_mul(*b) {
                return Exponent(Repr::Small(s));
            }
        }
        Exponent::from_big(self.to_big() * rhs.to_big())
    }
}

impl Neg for &Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        match &self.0 {
            Repr::Small(v) => match v.checked_neg() {
                Some(n) => Exponent(Repr::Small(n)),
                None => Exponent::from_big(-BigInt::from(*v)),
            },
            Repr::Big(b) => Exponent::from_big(-b.clone()),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Exponent {
            type Output = Exponent;
            fn $m(self, rhs: Exponent) -> Exponent {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        -&self
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(v) => write!(f, "{v}"),
            Repr::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Exponent {
    type Err = num_bigint::ParseBigIntError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Ok(v) = s.parse::<i64>() {
            return Ok(Exponent(Repr::Small(v)));
        }
        s.parse::<BigInt>().map(Exponent::from_big)
    }
}

impl serde::Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match &self.0 {
            Repr::Small(v) => serializer.serialize_i64(*v),
            Repr::Big(b) => serializer.serialize_str(&b.to_string()),
        }
    }
}
