//! Cross-ratio energies, counted two ways.
//!
//! `E₁`, `E₂`, `E₃` count pairs of valid tuples with equal `f`, `g`, `h`
//! values. The direct method squares the multiplicities of the value
//! histogram. The dual method counts transformations instead: two tuples
//! have equal values exactly when one transformation carries the first onto
//! the second, and that transformation is unique, so with `N(τ)` the number
//! of pairs `(a, b) ∈ A×A` with `τ(a) = b`,
//!
//! * `E₁ = Σ N(N−1)(N−2)` over τ fixing 0, pairs taken with `a, b ≠ 0`;
//! * `E₂ = Σ N(N−1)(N−2)(N−3)`;
//! * `E₃ = Σ N(N−1)(N−2)(N−3)(N−4)`.
//!
//! Both sides are exact, so they must agree to the last unit.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_arith::ExtRational;
use crate::expander_sets::{image_count, Expander, ImageCaps, ImageCount, ImageValue, InputSet};
use crate::kernel::{self, falling};
use crate::projective::Mobius;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnergyCaps {
    /// Largest `|A|` for direct counting, by order.
    pub direct: [usize; 3],
    /// Largest `|A|` for dual counting (candidate search is `O(|A|⁶)`).
    pub dual: usize,
}

impl Default for EnergyCaps {
    fn default() -> Self {
        EnergyCaps {
            direct: [64, 32, 16],
            dual: 12,
        }
    }
}

impl EnergyCaps {
    pub const UNLIMITED: EnergyCaps = EnergyCaps {
        direct: [usize::MAX; 3],
        dual: usize::MAX,
    };

    fn check_direct(&self, order: u8, n: usize) -> Result<Expander> {
        let function = Expander::from_energy_order(order)?;
        let cap = self.direct[usize::from(order - 1)];
        if n > cap {
            return Err(Error::CapExceeded {
                what: "direct energy",
                size: n,
                cap,
            });
        }
        Ok(function)
    }

    fn check_dual(&self, order: u8, n: usize) -> Result<Expander> {
        let function = Expander::from_energy_order(order)?;
        if n > self.dual {
            return Err(Error::CapExceeded {
                what: "dual energy",
                size: n,
                cap: self.dual,
            });
        }
        Ok(function)
    }
}

/// Multiplicity `μ(x)` of each value over the valid tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityHistogram {
    pub order: u8,
    /// Sorted by value.
    pub entries: Vec<(ImageValue, u64)>,
    pub total: u64,
}

impl MultiplicityHistogram {
    pub fn energy(&self) -> u128 {
        self.entries
            .iter()
            .map(|(_, m)| u128::from(*m) * u128::from(*m))
            .sum()
    }

    pub fn multiplicity(&self, v: &ImageValue) -> u64 {
        self.entries
            .binary_search_by(|(x, _)| x.cmp(v))
            .map_or(0, |i| self.entries[i].1)
    }
}

pub fn histogram(order: u8, set: &InputSet, caps: &EnergyCaps) -> Result<MultiplicityHistogram> {
    let function = caps.check_direct(order, set.len())?;
    let entries = kernel::histogram(set, function);
    let total = entries.iter().map(|(_, m)| m).sum();
    Ok(MultiplicityHistogram {
        order,
        entries,
        total,
    })
}

/// Energy from the value histogram.
pub fn energy_direct(order: u8, set: &InputSet, caps: &EnergyCaps) -> Result<u128> {
    let function = caps.check_direct(order, set.len())?;
    Ok(image_count(function, set, &ImageCaps::UNLIMITED)?.energy)
}

/// Transformations matching at least three pairs of `A×A`, with
/// `N(τ) = #{(a, b) : τ(a) = b}`. For order 1 only transformations fixing 0
/// are kept and `N` ignores the pair `(0, 0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformationTally {
    pub order: u8,
    pub entries: BTreeMap<Mobius, u64>,
}

impl TransformationTally {
    /// Tuple length whose coincidences this tally counts.
    pub fn tuple_len(&self) -> u32 {
        u32::from(self.order) + 2
    }

    pub fn energy(&self) -> u128 {
        let k = self.tuple_len();
        self.entries
            .values()
            .map(|&n| u128::from(falling(n, k)))
            .sum()
    }

    /// How many tallied transformations have a positive and a negative
    /// determinant, respectively.
    pub fn orientation_counts(&self) -> (u64, u64) {
        self.entries
            .keys()
            .fold((0, 0), |(pos, neg), t| match t.orientation() {
                Ordering::Greater => (pos + 1, neg),
                _ => (pos, neg + 1),
            })
    }
}

fn ordered_triples(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i != j && j != k && i != k {
                    out.push([i, j, k]);
                }
            }
        }
    }
    out
}

pub fn transformation_tally(
    order: u8,
    set: &InputSet,
    caps: &EnergyCaps,
) -> Result<TransformationTally> {
    caps.check_dual(order, set.len())?;
    // Order 1 pins the first point of every triple at 0 ↦ 0 and draws the
    // rest from the nonzero elements.
    let (xs, pinned): (Vec<ExtRational>, bool) = if order == 1 {
        let zero = BigRational::zero();
        (set.without(&zero).to_ext(), true)
    } else {
        (set.to_ext(), false)
    };
    let zero = ExtRational::zero();
    let frames: Vec<[usize; 3]> = if pinned {
        // (0, x_i, x_j) with the slot for 0 marked by usize::MAX.
        (0..xs.len())
            .flat_map(|i| {
                (0..xs.len())
                    .filter(move |&j| j != i)
                    .map(move |j| [usize::MAX, i, j])
            })
            .collect()
    } else {
        ordered_triples(xs.len())
    };
    let point = |i: usize| if i == usize::MAX { &zero } else { &xs[i] };
    let normalizer = |f: &[usize; 3]| {
        Mobius::normalizing(point(f[0]), point(f[1]), point(f[2])).expect("distinct frame")
    };

    // Sources can be taken up to order: permuting the three pairs does not
    // change the transformation.
    let sources: Vec<Mobius> = frames
        .iter()
        .filter(|f| f[1] < f[2] && (pinned || f[0] < f[1]))
        .map(normalizer)
        .collect();
    let targets: Vec<Mobius> = frames.par_iter().map(|f| normalizer(f).inverse()).collect();

    let candidates: FxHashSet<Mobius> = sources
        .par_iter()
        .fold(FxHashSet::default, |mut acc, src| {
            acc.extend(targets.iter().map(|dst| dst.compose(src)));
            acc
        })
        .reduce(FxHashSet::default, |a, b| {
            let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
            big.extend(small);
            big
        });

    let members: FxHashSet<&ExtRational> = xs.iter().collect();
    let entries: BTreeMap<Mobius, u64> = candidates
        .into_par_iter()
        .map(|t| {
            let n = xs.iter().filter(|a| members.contains(&t.apply(a))).count() as u64;
            (t, n)
        })
        .filter(|(_, n)| *n >= 3)
        .collect();
    Ok(TransformationTally { order, entries })
}

/// Energy from the transformation tally.
pub fn energy_dual(order: u8, set: &InputSet, caps: &EnergyCaps) -> Result<u128> {
    Ok(transformation_tally(order, set, caps)?.energy())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CauchySchwarzReport {
    pub order: u8,
    pub n: usize,
    pub tuple_count: u64,
    pub image_count: u64,
    pub energy: u128,
    /// `⌈tuple_count² / energy⌉`, or 0 when there are no tuples.
    pub lower_bound: u64,
    /// `image_count ≥ lower_bound`.
    pub holds: bool,
    /// Equality in Cauchy–Schwarz: every value has the same multiplicity.
    pub flat: bool,
}

impl CauchySchwarzReport {
    pub fn from_count(count: &ImageCount) -> Self {
        let t = u128::from(count.tuple_count);
        let lower_bound = if count.energy == 0 {
            0
        } else {
            (t * t).div_ceil(count.energy) as u64
        };
        let flat = count.energy * u128::from(count.image_count) == t * t;
        CauchySchwarzReport {
            order: count.function.energy_order(),
            n: count.n,
            tuple_count: count.tuple_count,
            image_count: count.image_count,
            energy: count.energy,
            lower_bound,
            holds: count.image_count >= lower_bound,
            flat,
        }
    }
}

pub fn cauchy_schwarz_report(
    order: u8,
    set: &InputSet,
    caps: &EnergyCaps,
) -> Result<CauchySchwarzReport> {
    let function = caps.check_direct(order, set.len())?;
    let count = image_count(function, set, &ImageCaps::UNLIMITED)?;
    Ok(CauchySchwarzReport::from_count(&count))
}

/// Closed-form number of valid tuples for an energy order.
pub fn valid_tuple_count(order: u8, set: &InputSet) -> Result<u64> {
    let function = Expander::from_energy_order(order)?;
    let n = set.len() as u64;
    Ok(match function {
        Expander::F => {
            let nonzero = n - u64::from(set.contains(&BigRational::zero()));
            falling(nonzero, 3)
        }
        Expander::G | Expander::H => falling(n, function.arity()),
    })
}
