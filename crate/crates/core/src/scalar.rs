//! Max-plus scalars over the rationals.
//!
//! A [`TropScalar`] is either an exact rational or the bottom element `-inf`.
//! Tropical addition is `max` (via `Ord`), tropical multiplication is the
//! ordinary sum (via `Add`), with bottom absorbing. Overflow of the
//! underlying `i64` rationals panics instead of wrapping, so a finished
//! computation is always exact.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Exact rational used for finite tropical values.
pub type Rational = Rational64;

const OVERFLOW: &str = "tropical arithmetic overflowed i64 rationals";

/// An element of `Q ∪ {-inf}`.
///
/// The derived order puts `Bottom` below every finite value, which is exactly
/// the max-plus order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[derive(Default)]
pub enum TropScalar {
    #[default]
    Bottom,
    Finite(Rational),
}

impl TropScalar {
    /// The tropical zero, `-inf`.
    pub const BOTTOM: TropScalar = TropScalar::Bottom;
    /// The tropical unit, `0`.
    pub const UNIT: TropScalar = TropScalar::Finite(Rational::new_raw(0, 1));

    pub fn int(v: i64) -> Self {
        TropScalar::Finite(Rational::from_integer(v))
    }

    pub fn ratio(numer: i64, denom: i64) -> Self {
        TropScalar::Finite(Rational::new(numer, denom))
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, TropScalar::Bottom)
    }

    pub fn is_finite(&self) -> bool {
        !self.is_bottom()
    }

    pub fn finite(&self) -> Option<Rational> {
        match self {
            TropScalar::Bottom => None,
            TropScalar::Finite(r) => Some(*r),
        }
    }

    /// Multiplies by a nonnegative integer (`k`-fold tropical power).
    /// `0 · x` is the unit, matching the empty product.
    pub fn scale(self, k: i64) -> Self {
        assert!(k >= 0, "negative tropical power");
        if k == 0 {
            return TropScalar::UNIT;
        }
        match self {
            TropScalar::Bottom => TropScalar::Bottom,
            TropScalar::Finite(r) => {
                TropScalar::Finite(r.checked_mul(&Rational::from_integer(k)).expect(OVERFLOW))
            }
        }
    }

    /// Divides a finite value by a positive integer; bottom stays bottom.
    pub fn div_int(self, k: i64) -> Self {
        assert!(k > 0, "division by a nonpositive integer");
        match self {
            TropScalar::Bottom => TropScalar::Bottom,
            TropScalar::Finite(r) => TropScalar::Finite(r / Rational::from_integer(k)),
        }
    }
}


#[inline]
pub(crate) fn rational_sum(a: Rational, b: Rational) -> Rational {
    if a.denom() == &1 && b.denom() == &1 {
        Rational::from_integer(i64::checked_add(*a.numer(), *b.numer()).expect(OVERFLOW))
    } else {
        a.checked_add(&b).expect(OVERFLOW)
    }
}

#[inline]
pub(crate) fn rational_diff(a: Rational, b: Rational) -> Rational {
    if a.denom() == &1 && b.denom() == &1 {
        Rational::from_integer(i64::checked_sub(*a.numer(), *b.numer()).expect(OVERFLOW))
    } else {
        a.checked_sub(&b).expect(OVERFLOW)
    }
}

/// Ordinary sum with bottom absorbing: the tropical product.
impl Add for TropScalar {
    type Output = TropScalar;

    #[inline]
    fn add(self, rhs: TropScalar) -> TropScalar {
        match (self, rhs) {
            (TropScalar::Finite(a), TropScalar::Finite(b)) => TropScalar::Finite(rational_sum(a, b)),
            _ => TropScalar::Bottom,
        }
    }
}

/// Subtraction of a finite value. Subtracting bottom is undefined and panics.
impl Sub for TropScalar {
    type Output = TropScalar;

    fn sub(self, rhs: TropScalar) -> TropScalar {
        match (self, rhs) {
            (_, TropScalar::Bottom) => panic!("cannot subtract -inf"),
            (TropScalar::Bottom, _) => TropScalar::Bottom,
            (TropScalar::Finite(a), TropScalar::Finite(b)) => TropScalar::Finite(rational_diff(a, b)),
        }
    }
}

impl Neg for TropScalar {
    type Output = TropScalar;

    fn neg(self) -> TropScalar {
        match self {
            TropScalar::Bottom => panic!("cannot negate -inf"),
            TropScalar::Finite(a) => TropScalar::Finite(-a),
        }
    }
}

impl From<i64> for TropScalar {
    fn from(v: i64) -> Self {
        TropScalar::int(v)
    }
}

impl From<Rational> for TropScalar {
    fn from(r: Rational) -> Self {
        TropScalar::Finite(r)
    }
}

impl fmt::Display for TropScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TropScalar::Bottom => f.write_str("-inf"),
            TropScalar::Finite(r) if r.denom() == &1 => write!(f, "{}", r.numer()),
            TropScalar::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl FromStr for TropScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s == "-inf" || s == "-∞" {
            return Ok(TropScalar::Bottom);
        }
        let bad = || Error::Parse(format!("invalid tropical scalar {s:?}"));
        match s.split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|_| bad())?;
                let q: i64 = q.trim().parse().map_err(|_| bad())?;
                if q.is_zero() {
                    return Err(bad());
                }
                Ok(TropScalar::Finite(Rational::new(p, q)))
            }
            None => s.parse::<i64>().map(TropScalar::int).map_err(|_| bad()),
        }
    }
}

impl Serialize for TropScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TropScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Least common multiple of `1..=n`.
pub fn lcm_upto(n: u64) -> u64 {
    assert!(n >= 1, "lcm_upto needs n >= 1");
    (1..=n).fold(1u64, |acc, k| acc.lcm(&k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bottom_is_neutral_for_max_and_absorbing_for_sum() {
        let x = TropScalar::int(3);
        assert_eq!(TropScalar::BOTTOM.max(x), x);
        assert_eq!(TropScalar::BOTTOM + x, TropScalar::BOTTOM);
        assert_eq!(x + TropScalar::UNIT, x);
    }

    #[test]
    fn rationals_stay_exact() {
        let a = TropScalar::ratio(1, 3);
        let b = TropScalar::ratio(2, 3);
        assert_eq!(a + b, TropScalar::int(1));
        assert_eq!(TropScalar::ratio(5, 2).scale(4), TropScalar::int(10));
        assert_eq!(TropScalar::int(7).div_int(2), TropScalar::ratio(7, 2));
    }

    #[test]
    fn text_round_trip() {
        for s in ["-inf", "0", "-12", "7/3", "-1/2"] {
            let x: TropScalar = s.parse().unwrap();
            assert_eq!(x.to_string(), s);
        }
        assert_eq!("4/2".parse::<TropScalar>().unwrap(), TropScalar::int(2));
        assert!("1/0".parse::<TropScalar>().is_err());
        assert!("x".parse::<TropScalar>().is_err());
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn overflow_panics() {
        let _ = TropScalar::int(i64::MAX) + TropScalar::int(1);
    }

    #[test]
    fn lcm_values() {
        assert_eq!(lcm_upto(1), 1);
        assert_eq!(lcm_upto(3), 6);
        assert_eq!(lcm_upto(5), 60);
        assert_eq!(lcm_upto(6), 60);
    }
}
