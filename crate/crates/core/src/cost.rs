//! Exact nonnegative costs with an explicit infinity.
//!
//! All solver arithmetic runs on [`num_rational::BigRational`]; floats never
//! touch a solver path. `Infinite` models "this machine cannot run this
//! job". The one non-obvious convention: scaling `Infinite` by a zero
//! fraction yields zero, so a fractional assignment may put weight 0 on a
//! forbidden entry without poisoning the load.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// A processing cost: a nonnegative rational or infinity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Cost {
    Finite(BigRational),
    Infinite,
}

impl Cost {
    pub fn zero() -> Self {
        Cost::Finite(BigRational::zero())
    }

    pub fn from_int(v: u64) -> Self {
        Cost::Finite(BigRational::from_integer(BigInt::from(v)))
    }

    /// Wraps a rational, rejecting negatives.
    pub fn from_ratio(r: BigRational) -> Result<Self, Error> {
        if r.is_negative() {
            return Err(Error::invalid(format!("negative cost {}", ratio_string(&r))));
        }
        Ok(Cost::Finite(r))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Cost::Finite(_))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Cost::Finite(r) if r.is_zero())
    }

    pub fn as_ratio(&self) -> Option<&BigRational> {
        match self {
            Cost::Finite(r) => Some(r),
            Cost::Infinite => None,
        }
    }

    /// Scales by a nonnegative fraction. `Infinite * 0 = 0`.
    pub fn times(&self, f: &BigRational) -> Cost {
        debug_assert!(!f.is_negative(), "cost scaling must be nonnegative");
        if f.is_zero() {
            return Cost::zero();
        }
        match self {
            Cost::Finite(r) => Cost::Finite(r * f),
            Cost::Infinite => Cost::Infinite,
        }
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a + b),
            _ => Cost::Infinite,
        }
    }
}

impl Add<&Cost> for Cost {
    type Output = Cost;
    fn add(self, rhs: &Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a + b),
            _ => Cost::Infinite,
        }
    }
}

impl AddAssign<&Cost> for Cost {
    fn add_assign(&mut self, rhs: &Cost) {
        match (&mut *self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => *a += b,
            (slot, _) => *slot = Cost::Infinite,
        }
    }
}

impl std::iter::Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        let mut acc = Cost::zero();
        for c in iter {
            acc += &c;
        }
        acc
    }
}

/// Total order with every finite value below `Infinite`.
impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Cost::Finite(a), Cost::Finite(b)) => a.cmp(b),
            (Cost::Finite(_), Cost::Infinite) => Ordering::Less,
            (Cost::Infinite, Cost::Finite(_)) => Ordering::Greater,
            (Cost::Infinite, Cost::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(r) => write!(f, "{}", ratio_string(r)),
            Cost::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Cost {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if s == "inf" {
            return Ok(Cost::Infinite);
        }
        Cost::from_ratio(parse_ratio(s)?)
    }
}

/// Formats a rational as `p/q` in lowest terms, keeping the denominator even
/// when it is 1. This is the on-disk representation; it round-trips exactly.
pub fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p`, `p/q`, or a signed variant into a rational. Rejects zero
/// denominators and anything non-numeric.
pub fn parse_ratio(s: &str) -> Result<BigRational, Error> {
    let bad = || Error::invalid(format!("cannot parse rational {s:?}"));
    let (num_s, den_s) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let numer = BigInt::from_str(num_s.trim()).map_err(|_| bad())?;
    let denom = BigInt::from_str(den_s.trim()).map_err(|_| bad())?;
    if denom.is_zero() {
        return Err(Error::invalid(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(numer, denom))
}

/// Shorthand for building rationals in tests and examples.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Shorthand for whole-number rationals.
pub fn int_ratio(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// 2^e as an exact rational, for negative and nonnegative `e`.
pub fn pow2_ratio(e: i64) -> BigRational {
    let base = BigInt::one() << e.unsigned_abs() as usize;
    if e >= 0 {
        BigRational::from_integer(base)
    } else {
        BigRational::new(BigInt::one(), base)
    }
}
