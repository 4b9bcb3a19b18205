//! Projective transformations of the extended rational line.
//!
//! A [`Mobius`] is stored as the canonical integer representative of its
//! class in PGL₂(ℚ): coprime entries with the first nonzero entry positive.
//! The action on the line only depends on the class, so this form is exact
//! and unique without rescaling to determinant one.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact_arith::{canonical_projective, clear_denominators, make_rational, ExtRational};

/// `x ↦ (p·x + q) / (r·x + s)` with `p·s − q·r ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mobius {
    p: BigInt,
    q: BigInt,
    r: BigInt,
    s: BigInt,
}

impl Mobius {
    pub fn new(
        p: impl Into<BigInt>,
        q: impl Into<BigInt>,
        r: impl Into<BigInt>,
        s: impl Into<BigInt>,
    ) -> Result<Self> {
        Self::from_entries([p.into(), q.into(), r.into(), s.into()])
    }

    pub fn from_entries(entries: [BigInt; 4]) -> Result<Self> {
        let [p, q, r, s] = &entries;
        if (p * s - q * r).is_zero() {
            return Err(Error::Singular);
        }
        let c = canonical_projective(entries.to_vec())?;
        let [p, q, r, s]: [BigInt; 4] = c.try_into().expect("four entries");
        Ok(Mobius { p, q, r, s })
    }

    pub fn from_rationals(entries: [BigRational; 4]) -> Result<Self> {
        let ints: [BigInt; 4] = clear_denominators(&entries)
            .try_into()
            .expect("four entries");
        Self::from_entries(ints)
    }

    pub fn identity() -> Self {
        Mobius {
            p: BigInt::one(),
            q: BigInt::zero(),
            r: BigInt::zero(),
            s: BigInt::one(),
        }
    }

    /// `(p, q, r, s)` of the canonical representative.
    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.p, &self.q, &self.r, &self.s]
    }

    pub fn determinant(&self) -> BigInt {
        &self.p * &self.s - &self.q * &self.r
    }

    /// Sign of the determinant of the canonical representative. Positive
    /// means the class has a representative in SL₂(ℝ).
    pub fn orientation(&self) -> Ordering {
        self.determinant().cmp(&BigInt::zero())
    }

    pub fn apply(&self, x: &ExtRational) -> ExtRational {
        match x {
            ExtRational::Finite(v) => {
                let (u, w) = (v.numer(), v.denom());
                let num = &self.p * u + &self.q * w;
                let den = &self.r * u + &self.s * w;
                make_rational(num, den).expect("nonsingular map never yields 0/0")
            }
            ExtRational::Infinity => {
                if self.r.is_zero() {
                    ExtRational::Infinity
                } else {
                    make_rational(self.p.clone(), self.r.clone()).expect("r is nonzero")
                }
            }
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        let (a, b) = (self, other);
        Mobius::from_entries([
            &a.p * &b.p + &a.q * &b.r,
            &a.p * &b.q + &a.q * &b.s,
            &a.r * &b.p + &a.s * &b.r,
            &a.r * &b.q + &a.s * &b.s,
        ])
        .expect("product of nonsingular matrices is nonsingular")
    }

    pub fn inverse(&self) -> Mobius {
        Mobius::from_entries([self.s.clone(), -&self.q, -&self.r, self.p.clone()])
            .expect("adjugate of a nonsingular matrix is nonsingular")
    }

    /// The unique map sending `(a, b, c)` to `(∞, 0, 1)`.
    ///
    /// Each case solves `r·a + s = 0`, `p·b + q = 0` and `p·c + q = r·c + s`,
    /// with the condition for an infinite point replaced by its limit form.
    pub fn normalizing(a: &ExtRational, b: &ExtRational, c: &ExtRational) -> Result<Mobius> {
        if a == b || b == c || a == c {
            return Err(Error::RepeatedEntry);
        }
        let one = BigRational::one;
        let zero = BigRational::zero;
        let entries = match (a.as_finite(), b.as_finite(), c.as_finite()) {
            (Some(a), Some(b), Some(c)) => {
                let (ca, cb) = (c - a, c - b);
                [ca.clone(), -(b * &ca), cb.clone(), -(a * &cb)]
            }
            (None, Some(b), Some(c)) => [one(), -b.clone(), zero(), c - b],
            (Some(a), None, Some(c)) => [zero(), c - a, one(), -a.clone()],
            (Some(a), Some(b), None) => [one(), -b.clone(), one(), -a.clone()],
            _ => unreachable!("at most one entry of a distinct triple is infinite"),
        };
        Mobius::from_rationals(entries)
    }
}

impl Default for Mobius {
    fn default() -> Self {
        Self::identity()
    }
}

impl fmt::Display for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}, {}]", self.p, self.q, self.r, self.s)
    }
}

pub type Triple = [ExtRational; 3];
pub type Quadruple = [ExtRational; 4];

/// The unique transformation with `t(src[i]) = dst[i]` for `i = 0, 1, 2`.
pub fn solve_triple(src: &Triple, dst: &Triple) -> Result<Mobius> {
    let to_src = Mobius::normalizing(&src[0], &src[1], &src[2])?;
    let to_dst = Mobius::normalizing(&dst[0], &dst[1], &dst[2])?;
    Ok(to_dst.inverse().compose(&to_src))
}

fn pairwise_distinct<T: PartialEq>(xs: &[T]) -> bool {
    xs.iter()
        .enumerate()
        .all(|(i, x)| xs[i + 1..].iter().all(|y| x != y))
}

/// `X(a,b,c,d) = (a−b)(c−d) / ((b−c)(a−d))` for distinct finite inputs.
pub fn cross_ratio(
    a: &ExtRational,
    b: &ExtRational,
    c: &ExtRational,
    d: &ExtRational,
) -> Result<ExtRational> {
    let (a, b, c, d) = (a.finite()?, b.finite()?, c.finite()?, d.finite()?);
    if !pairwise_distinct(&[a, b, c, d]) {
        return Err(Error::RepeatedEntry);
    }
    Ok(ExtRational::Finite(
        ((a - b) * (c - d)) / ((b - c) * (a - d)),
    ))
}

pub fn quadruple_cross_ratio(q: &Quadruple) -> Result<ExtRational> {
    cross_ratio(&q[0], &q[1], &q[2], &q[3])
}

/// The transformation fixed by the first three coordinates, if it also
/// carries the fourth coordinate of `aq` onto that of `bq`.
pub fn relating_transformation(aq: &Quadruple, bq: &Quadruple) -> Result<Option<Mobius>> {
    for q in [aq, bq] {
        q.iter().try_for_each(|x| x.finite().map(|_| ()))?;
        if !pairwise_distinct(q) {
            return Err(Error::RepeatedEntry);
        }
    }
    let t = solve_triple(
        &[aq[0].clone(), aq[1].clone(), aq[2].clone()],
        &[bq[0].clone(), bq[1].clone(), bq[2].clone()],
    )?;
    Ok((t.apply(&aq[3]) == bq[3]).then_some(t))
}

/// Whether some projective transformation sends each `aq[i]` to `bq[i]`.
/// Decided through [`solve_triple`], not through cross ratios.
pub fn quadruple_related(aq: &Quadruple, bq: &Quadruple) -> Result<bool> {
    relating_transformation(aq, bq).map(|t| t.is_some())
}
