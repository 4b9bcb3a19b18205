//! Exact arithmetic on the extended rational line ℚ ∪ {∞}.
//!
//! `Finite` values are always held in lowest terms with a positive
//! denominator, so structural equality is value equality. The point at
//! infinity is unsigned. Only division of a nonzero finite value by zero
//! produces it; every other operation that touches it is an error, and
//! callers that need limits (Möbius evaluation) do their own case analysis.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtRational {
    Finite(BigRational),
    Infinity,
}

pub use ExtRational::Infinity;

impl ExtRational {
    pub fn integer(n: i64) -> Self {
        ExtRational::Finite(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRational::Finite(_))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtRational::Finite(v) if v.is_zero())
    }

    pub fn as_finite(&self) -> Option<&BigRational> {
        match self {
            ExtRational::Finite(v) => Some(v),
            ExtRational::Infinity => None,
        }
    }

    pub fn finite(&self) -> Result<&BigRational> {
        self.as_finite().ok_or(Error::NotFinite)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        Ok(ExtRational::Finite(
            self.finite_operand()? + rhs.finite_operand()?,
        ))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        Ok(ExtRational::Finite(
            self.finite_operand()? - rhs.finite_operand()?,
        ))
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        Ok(ExtRational::Finite(
            self.finite_operand()? * rhs.finite_operand()?,
        ))
    }

    /// Division; `x / 0` is infinity for nonzero `x` and `0 / 0` is rejected.
    pub fn div(&self, rhs: &Self) -> Result<Self> {
        let (x, y) = (self.finite_operand()?, rhs.finite_operand()?);
        if y.is_zero() {
            if x.is_zero() {
                Err(Error::Indeterminate)
            } else {
                Ok(ExtRational::Infinity)
            }
        } else {
            Ok(ExtRational::Finite(x / y))
        }
    }

    fn finite_operand(&self) -> Result<&BigRational> {
        self.as_finite().ok_or(Error::InfiniteOperand)
    }
}

/// Builds `numerator / denominator` in canonical form. A zero denominator
/// gives infinity; `0/0` is rejected.
pub fn make_rational(
    numerator: impl Into<BigInt>,
    denominator: impl Into<BigInt>,
) -> Result<ExtRational> {
    let (n, d) = (numerator.into(), denominator.into());
    match (n.is_zero(), d.is_zero()) {
        (true, true) => Err(Error::Indeterminate),
        (false, true) => Ok(ExtRational::Infinity),
        _ => Ok(ExtRational::Finite(BigRational::new(n, d))),
    }
}

impl From<BigRational> for ExtRational {
    fn from(v: BigRational) -> Self {
        ExtRational::Finite(v)
    }
}

impl From<i64> for ExtRational {
    fn from(v: i64) -> Self {
        ExtRational::integer(v)
    }
}

/// Finite values in numeric order, infinity above all of them.
impl Ord for ExtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => a.cmp(b),
            (ExtRational::Finite(_), ExtRational::Infinity) => Ordering::Less,
            (ExtRational::Infinity, ExtRational::Finite(_)) => Ordering::Greater,
            (ExtRational::Infinity, ExtRational::Infinity) => Ordering::Equal,
        }
    }
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(v) => write!(f, "{v}"),
            ExtRational::Infinity => f.write_str("inf"),
        }
    }
}

/// Accepts `p/q`, a bare integer, or `inf`.
impl FromStr for ExtRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidParameter(format!("not a rational number: {s:?}"));
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Ok(ExtRational::Infinity);
        }
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                make_rational(n, d)
            }
            None => {
                let n: BigInt = s.parse().map_err(|_| bad())?;
                Ok(ExtRational::Finite(BigRational::from_integer(n)))
            }
        }
    }
}

/// Scales a vector of rationals to integers by the lcm of the denominators.
pub fn clear_denominators(values: &[BigRational]) -> Vec<BigInt> {
    let lcm = values
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    values
        .iter()
        .map(|v| v.numer() * (&lcm / v.denom()))
        .collect()
}

/// Canonical representative of a projective integer vector: entries coprime
/// and the first nonzero entry positive.
pub fn canonical_projective(mut coords: Vec<BigInt>) -> Result<Vec<BigInt>> {
    let g = coords.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return Err(Error::ZeroVector);
    }
    let negate = coords
        .iter()
        .find(|c| !c.is_zero())
        .is_some_and(|c| c.is_negative());
    for c in coords.iter_mut() {
        *c = &*c / &g;
        if negate {
            *c = -&*c;
        }
    }
    Ok(coords)
}
