//! Integer enumeration engine shared by image and energy computations.
//!
//! Cross ratios are invariant under `x ↦ u·x` for `u ≠ 0`, and that map
//! fixes 0, so an input set can be scaled by the lcm of its denominators
//! without changing any of `f`, `g` or `h`. The scaled integers are then
//! processed in the narrowest machine type whose products cannot overflow,
//! falling back to `BigInt`.

use std::hash::{BuildHasher, Hash};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::exact_arith::{clear_denominators, ExtRational};
use crate::expander_sets::{Expander, ImageValue, InputSet};

pub(crate) trait Int: Integer + Signed + Clone + Hash + Send + Sync + 'static {
    fn to_big(&self) -> BigInt;
}

impl Int for i64 {
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Int for i128 {
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Int for BigInt {
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

pub(crate) enum Lane {
    Narrow(Vec<i64>),
    Wide(Vec<i128>),
    Big(Vec<BigInt>),
}

impl Lane {
    pub(crate) fn for_set(set: &InputSet) -> Lane {
        let ints = clear_denominators(set.elements());
        let max = ints.iter().map(|x| x.abs()).max().unwrap_or_default();
        // |x| < 2^k bounds differences by 2^(k+1) and their products by 2^(2k+2).
        if max < BigInt::from(1i64 << 30) {
            Lane::Narrow(ints.iter().map(|x| x.to_i64().unwrap()).collect())
        } else if max < BigInt::from(1i128 << 62) {
            Lane::Wide(ints.iter().map(|x| x.to_i128().unwrap()).collect())
        } else {
            Lane::Big(ints)
        }
    }
}

pub(crate) type Frac<T> = (T, T);

fn reduce<T: Int>(num: T, den: T) -> Frac<T> {
    let g = num.gcd(&den);
    let (n, d) = (num / g.clone(), den / g);
    if d.is_negative() {
        (-n, -d)
    } else {
        (n, d)
    }
}

#[inline]
fn cross<T: Int>(a: &T, b: &T, c: &T, d: &T) -> Frac<T> {
    let num = (a.clone() - b.clone()) * (c.clone() - d.clone());
    let den = (b.clone() - c.clone()) * (a.clone() - d.clone());
    reduce(num, den)
}

pub(crate) fn frac_to_ext<T: Int>(f: &Frac<T>) -> ExtRational {
    ExtRational::Finite(BigRational::new(f.0.to_big(), f.1.to_big()))
}

/// Enumerates every valid tuple of one expander function starting with a
/// given leading element and emits its value key.
pub(crate) trait Kernel<T: Int>: Sync {
    type Key: Hash + Eq + Clone + Send + Sync + Ord;
    fn visit(xs: &[T], lead: usize, emit: &mut dyn FnMut(Self::Key));
    fn to_value(key: &Self::Key) -> ImageValue;
}

pub(crate) struct FKernel;
pub(crate) struct GKernel;
pub(crate) struct HKernel;

impl<T: Int> Kernel<T> for FKernel {
    type Key = Frac<T>;

    fn visit(xs: &[T], i: usize, emit: &mut dyn FnMut(Frac<T>)) {
        let zero = T::zero();
        let a = &xs[i];
        if a.is_zero() {
            return;
        }
        for (j, b) in xs.iter().enumerate() {
            if j == i || b.is_zero() {
                continue;
            }
            for (k, c) in xs.iter().enumerate() {
                if k == i || k == j || c.is_zero() {
                    continue;
                }
                emit(cross(&zero, a, b, c));
            }
        }
    }

    fn to_value(key: &Frac<T>) -> ImageValue {
        ImageValue::Single(frac_to_ext(key))
    }
}

impl<T: Int> Kernel<T> for GKernel {
    type Key = Frac<T>;

    fn visit(xs: &[T], i: usize, emit: &mut dyn FnMut(Frac<T>)) {
        let a = &xs[i];
        for (j, b) in xs.iter().enumerate() {
            if j == i {
                continue;
            }
            let ab = a.clone() - b.clone();
            for (k, c) in xs.iter().enumerate() {
                if k == i || k == j {
                    continue;
                }
                let bc = b.clone() - c.clone();
                for (l, d) in xs.iter().enumerate() {
                    if l == i || l == j || l == k {
                        continue;
                    }
                    let num = ab.clone() * (c.clone() - d.clone());
                    let den = bc.clone() * (a.clone() - d.clone());
                    emit(reduce(num, den));
                }
            }
        }
    }

    fn to_value(key: &Frac<T>) -> ImageValue {
        ImageValue::Single(frac_to_ext(key))
    }
}

impl<T: Int> Kernel<T> for HKernel {
    type Key = (Frac<T>, Frac<T>);

    fn visit(xs: &[T], i: usize, emit: &mut dyn FnMut(Self::Key)) {
        let n = xs.len();
        let a = &xs[i];
        let mut tail: Vec<Option<Frac<T>>> = vec![None; n];
        for (j, b) in xs.iter().enumerate() {
            if j == i {
                continue;
            }
            for (k, c) in xs.iter().enumerate() {
                if k == i || k == j {
                    continue;
                }
                for (l, d) in xs.iter().enumerate() {
                    tail[l] = (l != i && l != j && l != k).then(|| cross(a, b, c, d));
                }
                for (l, x) in tail.iter().enumerate() {
                    let Some(x) = x else { continue };
                    for (m, y) in tail.iter().enumerate() {
                        if m == l {
                            continue;
                        }
                        if let Some(y) = y {
                            emit((x.clone(), y.clone()));
                        }
                    }
                }
            }
        }
    }

    fn to_value(key: &Self::Key) -> ImageValue {
        ImageValue::Pair(frac_to_ext(&key.0), frac_to_ext(&key.1))
    }
}

/// Tuples with more distinct keys than this are counted in several passes,
/// each keeping only the keys that hash into one shard.
pub(crate) const SHARD_BUDGET: u64 = 6_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub(crate) struct Stats {
    pub distinct: u64,
    pub tuples: u64,
    pub energy: u128,
}

fn shard_of<K: Hash>(key: &K, shards: u64) -> u64 {
    // Independent of the FxHash used inside the maps.
    let h = std::hash::BuildHasherDefault::<std::collections::hash_map::DefaultHasher>::default()
        .hash_one(key);
    h % shards
}

fn tally_shard<T: Int, K: Kernel<T>>(xs: &[T], shard: u64, shards: u64) -> FxHashMap<K::Key, u32> {
    (0..xs.len())
        .into_par_iter()
        .fold(FxHashMap::default, |mut acc, lead| {
            K::visit(xs, lead, &mut |key| {
                if shards == 1 || shard_of(&key, shards) == shard {
                    *acc.entry(key).or_insert(0) += 1;
                }
            });
            acc
        })
        .reduce(FxHashMap::default, |a, b| {
            let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
            for (k, v) in small {
                *big.entry(k).or_insert(0) += v;
            }
            big
        })
}

pub(crate) fn tally<T: Int, K: Kernel<T>>(xs: &[T]) -> FxHashMap<K::Key, u32> {
    tally_shard::<T, K>(xs, 0, 1)
}

pub(crate) fn stats<T: Int, K: Kernel<T>>(xs: &[T], arity: u32) -> Stats {
    let bound = falling(xs.len() as u64, arity);
    let shards = bound.div_ceil(SHARD_BUDGET).max(1);
    (0..shards)
        .map(|s| {
            let map = tally_shard::<T, K>(xs, s, shards);
            map.values().fold(
                Stats {
                    distinct: map.len() as u64,
                    ..Stats::default()
                },
                |mut st, &m| {
                    st.tuples += u64::from(m);
                    st.energy += u128::from(m) * u128::from(m);
                    st
                },
            )
        })
        .fold(Stats::default(), |a, b| Stats {
            distinct: a.distinct + b.distinct,
            tuples: a.tuples + b.tuples,
            energy: a.energy + b.energy,
        })
}

/// `n (n−1) ⋯ (n−k+1)`.
pub fn falling(n: u64, k: u32) -> u64 {
    (0..u64::from(k)).map(|i| n.saturating_sub(i)).product()
}

/// Runs `$body` with `$xs` bound to the lane's integer slice and `$K` to
/// the kernel for `$kind`.
macro_rules! dispatch {
    ($set:expr, $kind:expr, |$xs:ident, $T:ident, $K:ident| $body:expr) => {{
        use $crate::expander_sets::Expander;
        use $crate::kernel::{FKernel, GKernel, HKernel, Lane};
        match (Lane::for_set($set), $kind) {
            (Lane::Narrow($xs), Expander::F) => {
                type $T = i64;
                type $K = FKernel;
                $body
            }
            (Lane::Narrow($xs), Expander::G) => {
                type $T = i64;
                type $K = GKernel;
                $body
            }
            (Lane::Narrow($xs), Expander::H) => {
                type $T = i64;
                type $K = HKernel;
                $body
            }
            (Lane::Wide($xs), Expander::F) => {
                type $T = i128;
                type $K = FKernel;
                $body
            }
            (Lane::Wide($xs), Expander::G) => {
                type $T = i128;
                type $K = GKernel;
                $body
            }
            (Lane::Wide($xs), Expander::H) => {
                type $T = i128;
                type $K = HKernel;
                $body
            }
            (Lane::Big($xs), Expander::F) => {
                type $T = num_bigint::BigInt;
                type $K = FKernel;
                $body
            }
            (Lane::Big($xs), Expander::G) => {
                type $T = num_bigint::BigInt;
                type $K = GKernel;
                $body
            }
            (Lane::Big($xs), Expander::H) => {
                type $T = num_bigint::BigInt;
                type $K = HKernel;
                $body
            }
        }
    }};
}

pub(crate) fn image_stats(set: &InputSet, kind: Expander) -> Stats {
    dispatch!(set, kind, |xs, T, K| stats::<T, K>(&xs, kind.arity()))
}

/// Value keys with multiplicities, materialized as exact values.
pub(crate) fn histogram(set: &InputSet, kind: Expander) -> Vec<(ImageValue, u64)> {
    dispatch!(set, kind, |xs, T, K| {
        let mut entries: Vec<_> = tally::<T, K>(&xs)
            .into_iter()
            .map(|(k, m)| (<K as Kernel<T>>::to_value(&k), u64::from(m)))
            .collect();
        entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        entries
    })
}
