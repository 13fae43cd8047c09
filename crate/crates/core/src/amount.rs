//! Exact rational quantities.
//!
//! Every claim, endowment, award and solver level in the crate is an
//! [`Amount`]. The textual form is a decimal integer (`"12"`, `"-3"`) or a
//! reduced fraction (`"269/123"`). Decimal points and exponents are rejected,
//! so no value ever passes through floating point.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An exact rational number kept in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Amount(BigRational);

/// Error returned when parsing an [`Amount`] from text.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseAmountError {
    #[error("empty amount")]
    Empty,
    #[error("amount {0:?} is not an integer or p/q fraction")]
    Malformed(String),
    #[error("amount {0:?} has a zero denominator")]
    ZeroDenominator(String),
}

impl Amount {
    pub fn zero() -> Self {
        Amount(BigRational::zero())
    }

    pub fn one() -> Self {
        Amount(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Amount(BigRational::from_integer(BigInt::from(n)))
    }

    /// `numer / denom`, reduced. Panics if `denom == 0`.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Amount(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Amount(r)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Amount(self.0.abs())
    }

    pub fn half(&self) -> Self {
        Amount(&self.0 / BigInt::from(2))
    }

    pub fn recip(&self) -> Self {
        Amount(self.0.recip())
    }

    pub fn min_ref<'a>(&'a self, other: &'a Self) -> &'a Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max_ref<'a>(&'a self, other: &'a Self) -> &'a Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Lossy conversion for display and plotting only.
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn is_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

impl FromStr for Amount {
    type Err = ParseAmountError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(ParseAmountError::Empty);
        }
        let malformed = || ParseAmountError::Malformed(s.to_owned());
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (numer, denom) = match body.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (body, None),
        };
        if !is_digits(numer) || denom.is_some_and(|d| !is_digits(d)) {
            return Err(malformed());
        }
        let mut numer: BigInt = numer.parse().map_err(|_| malformed())?;
        if negative {
            numer = -numer;
        }
        let denom: BigInt = match denom {
            Some(d) => d.parse().map_err(|_| malformed())?,
            None => BigInt::one(),
        };
        if denom.is_zero() {
            return Err(ParseAmountError::ZeroDenominator(s.to_owned()));
        }
        Ok(Amount(BigRational::new(numer, denom)))
    }
}

impl Serialize for Amount {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Amount {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct Visitor;

        impl serde::de::Visitor<'_> for Visitor {
            type Value = Amount;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a string holding an integer or a p/q fraction")
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Amount, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_str(Visitor)
    }
}

impl From<i64> for Amount {
    fn from(n: i64) -> Self {
        Amount::from_integer(n)
    }
}

impl From<BigRational> for Amount {
    fn from(r: BigRational) -> Self {
        Amount(r)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Amount> for &Amount {
            type Output = Amount;
            fn $method(self, rhs: &Amount) -> Amount {
                Amount((&self.0).$method(&rhs.0))
            }
        }

        impl $trait<Amount> for Amount {
            type Output = Amount;
            fn $method(self, rhs: Amount) -> Amount {
                Amount(self.0.$method(rhs.0))
            }
        }

        impl $trait<&Amount> for Amount {
            type Output = Amount;
            fn $method(self, rhs: &Amount) -> Amount {
                Amount(self.0.$method(&rhs.0))
            }
        }

        impl $trait<Amount> for &Amount {
            type Output = Amount;
            fn $method(self, rhs: Amount) -> Amount {
                Amount((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Amount> for Amount {
    fn add_assign(&mut self, rhs: &Amount) {
        self.0 += &rhs.0;
    }
}

impl AddAssign<Amount> for Amount {
    fn add_assign(&mut self, rhs: Amount) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Amount> for Amount {
    fn sub_assign(&mut self, rhs: &Amount) {
        self.0 -= &rhs.0;
    }
}

impl Neg for Amount {
    type Output = Amount;
    fn neg(self) -> Amount {
        Amount(-self.0)
    }
}

impl Neg for &Amount {
    type Output = Amount;
    fn neg(self) -> Amount {
        Amount(-&self.0)
    }
}

impl Mul<i64> for &Amount {
    type Output = Amount;
    fn mul(self, rhs: i64) -> Amount {
        Amount(&self.0 * BigInt::from(rhs))
    }
}

impl Div<i64> for &Amount {
    type Output = Amount;
    fn div(self, rhs: i64) -> Amount {
        Amount(&self.0 / BigInt::from(rhs))
    }
}

impl Div<usize> for &Amount {
    type Output = Amount;
    fn div(self, rhs: usize) -> Amount {
        Amount(&self.0 / BigInt::from(rhs))
    }
}

impl PartialEq<i64> for Amount {
    fn eq(&self, other: &i64) -> bool {
        self.0.is_integer() && *self.0.numer() == BigInt::from(*other)
    }
}

impl PartialOrd<i64> for Amount {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.0.cmp(&BigRational::from_integer(BigInt::from(*other))))
    }
}

impl Sum for Amount {
    fn sum<I: Iterator<Item = Amount>>(iter: I) -> Amount {
        iter.fold(Amount::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Amount> for Amount {
    fn sum<I: Iterator<Item = &'a Amount>>(iter: I) -> Amount {
        let mut acc = Amount::zero();
        for x in iter {
            acc += x;
        }
        acc
    }
}

/// Parses a fraction literal; panics on malformed input. Intended for tests
/// and fixtures.
pub fn amt(s: &str) -> Amount {
    s.parse().unwrap_or_else(|e| panic!("bad amount literal {s:?}: {e}"))
}

/// Parses a list of fraction literals; see [`amt`].
pub fn amts(items: &[&str]) -> Vec<Amount> {
    items.iter().map(|s| amt(s)).collect()
}
