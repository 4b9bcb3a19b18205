//! Exact image sets of the three cross-ratio expanders
//!
//! * `f(a,b,c) = X(0,a,b,c)`
//! * `g(a,b,c,d) = X(a,b,c,d)`
//! * `h(a,b,c,d,e) = (X(a,b,c,d), X(a,b,c,e))`
//!
//! Only tuples on which every cross ratio is defined are enumerated. For `f`
//! that excludes any tuple containing 0, since it would collide with the
//! fixed first argument. The number of excluded ordered tuples out of
//! `|A|^k` is reported as `skipped`.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::ExtRational;
use crate::kernel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expander {
    F,
    G,
    H,
}

impl Expander {
    pub const ALL: [Expander; 3] = [Expander::F, Expander::G, Expander::H];

    /// Number of free variables.
    pub fn arity(self) -> u32 {
        match self {
            Expander::F => 3,
            Expander::G => 4,
            Expander::H => 5,
        }
    }

    /// The energy order (1, 2, 3) whose equation is built from this function.
    pub fn energy_order(self) -> u8 {
        match self {
            Expander::F => 1,
            Expander::G => 2,
            Expander::H => 3,
        }
    }

    pub fn from_energy_order(order: u8) -> Result<Self> {
        match order {
            1 => Ok(Expander::F),
            2 => Ok(Expander::G),
            3 => Ok(Expander::H),
            o => Err(Error::InvalidOrder(o)),
        }
    }
}

impl fmt::Display for Expander {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expander::F => "f",
            Expander::G => "g",
            Expander::H => "h",
        })
    }
}

impl FromStr for Expander {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f" => Ok(Expander::F),
            "g" => Ok(Expander::G),
            "h" => Ok(Expander::H),
            _ => Err(Error::InvalidParameter(format!("unknown function {s:?}"))),
        }
    }
}

/// A finite set of distinct rationals, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct InputSet {
    elements: Vec<BigRational>,
}

impl InputSet {
    /// Rejects infinity and duplicates.
    pub fn new(values: impl IntoIterator<Item = ExtRational>) -> Result<Self> {
        let mut elements = values
            .into_iter()
            .map(|v| match v {
                ExtRational::Finite(v) => Ok(v),
                ExtRational::Infinity => Err(Error::NotFinite),
            })
            .collect::<Result<Vec<_>>>()?;
        elements.sort();
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateElement(w[0].to_string()));
        }
        Ok(InputSet { elements })
    }

    pub fn from_integers(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| ExtRational::integer(v)))
    }

    pub fn elements(&self) -> &[BigRational] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    pub fn to_ext(&self) -> Vec<ExtRational> {
        self.elements
            .iter()
            .cloned()
            .map(ExtRational::Finite)
            .collect()
    }

    /// The set without `x`; unchanged if `x` is absent.
    pub fn without(&self, x: &BigRational) -> InputSet {
        InputSet {
            elements: self.elements.iter().filter(|e| *e != x).cloned().collect(),
        }
    }

    /// Image under `x ↦ scale·x + shift`; `scale` must be nonzero.
    pub fn affine(&self, scale: &BigRational, shift: &BigRational) -> Result<InputSet> {
        if num_traits::Zero::is_zero(scale) {
            return Err(Error::InvalidParameter(
                "affine scale must be nonzero".into(),
            ));
        }
        Self::new(
            self.elements
                .iter()
                .map(|x| ExtRational::Finite(x * scale + shift)),
        )
    }
}

impl fmt::Display for InputSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ImageValue {
    Single(ExtRational),
    Pair(ExtRational, ExtRational),
}

impl fmt::Display for ImageValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImageValue::Single(x) => write!(f, "{x}"),
            ImageValue::Pair(x, y) => write!(f, "({x}, {y})"),
        }
    }
}

/// A deduplicated image set together with its enumeration bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueSet {
    pub function: Expander,
    /// Sorted, distinct.
    pub values: Vec<ImageValue>,
    /// Valid tuples enumerated.
    pub tuple_count: u64,
    /// Ordered tuples of `A^k` that were not valid.
    pub skipped: u64,
}

impl ValueSet {
    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn contains(&self, v: &ImageValue) -> bool {
        self.values.binary_search(v).is_ok()
    }
}

/// Cardinality data of an image without materializing its values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ImageCount {
    pub function: Expander,
    pub n: usize,
    pub image_count: u64,
    pub tuple_count: u64,
    pub skipped: u64,
    /// `Σ μ(x)²` over the value histogram.
    pub energy: u128,
}

/// Largest `|A|` per function for enumerations that hold the image in memory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ImageCaps {
    pub f: usize,
    pub g: usize,
    pub h: usize,
}

impl Default for ImageCaps {
    fn default() -> Self {
        ImageCaps {
            f: 256,
            g: 128,
            h: 40,
        }
    }
}

impl ImageCaps {
    pub const UNLIMITED: ImageCaps = ImageCaps {
        f: usize::MAX,
        g: usize::MAX,
        h: usize::MAX,
    };

    pub fn get(&self, function: Expander) -> usize {
        match function {
            Expander::F => self.f,
            Expander::G => self.g,
            Expander::H => self.h,
        }
    }

    pub fn check(&self, function: Expander, n: usize) -> Result<()> {
        let cap = self.get(function);
        if n > cap {
            return Err(Error::CapExceeded {
                what: match function {
                    Expander::F => "image of f",
                    Expander::G => "image of g",
                    Expander::H => "image of h",
                },
                size: n,
                cap,
            });
        }
        Ok(())
    }
}

fn skipped(function: Expander, n: usize, tuples: u64) -> u64 {
    (n as u64).pow(function.arity()) - tuples
}

/// The exact image set of `function` on `set`.
pub fn image(function: Expander, set: &InputSet) -> ValueSet {
    let hist = kernel::histogram(set, function);
    let tuple_count = hist.iter().map(|(_, m)| m).sum();
    ValueSet {
        function,
        values: hist.into_iter().map(|(v, _)| v).collect(),
        tuple_count,
        skipped: skipped(function, set.len(), tuple_count),
    }
}

pub fn image_f(set: &InputSet) -> ValueSet {
    image(Expander::F, set)
}

pub fn image_g(set: &InputSet) -> ValueSet {
    image(Expander::G, set)
}

pub fn image_h(set: &InputSet) -> ValueSet {
    image(Expander::H, set)
}

/// Counts `|function(set)|` and the histogram energy without keeping the
/// values. Large images are counted in hash-partitioned passes.
pub fn image_count(function: Expander, set: &InputSet, caps: &ImageCaps) -> Result<ImageCount> {
    caps.check(function, set.len())?;
    let st = kernel::image_stats(set, function);
    Ok(ImageCount {
        function,
        n: set.len(),
        image_count: st.distinct,
        tuple_count: st.tuples,
        skipped: skipped(function, set.len(), st.tuples),
        energy: st.energy,
    })
}
