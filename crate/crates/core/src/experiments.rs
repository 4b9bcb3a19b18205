//! Set families, growth scans and exponent fitting, plus the set-file and
//! CSV formats the command-line driver reads and writes.

use std::collections::BTreeSet;
use std::fmt;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::ExtRational;
use crate::expander_sets::{image_count, Expander, ImageCaps, InputSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Ap {
        start: BigRational,
        step: BigRational,
    },
    Gp {
        start: BigRational,
        ratio: BigRational,
    },
    /// Distinct integers drawn uniformly from `[1, bound]`.
    RandomInt { bound: u64, seed: u64 },
    /// `start², (start+1)², …` for `start ≥ 0`.
    Squares { start: u64 },
    /// The first `n` values of a set file, in file order.
    CustomFile { path: PathBuf },
}

impl Family {
    pub fn ap(start: i64, step: i64) -> Self {
        Family::Ap {
            start: BigRational::from_integer(start.into()),
            step: BigRational::from_integer(step.into()),
        }
    }

    pub fn gp(start: i64, ratio: i64) -> Self {
        Family::Gp {
            start: BigRational::from_integer(start.into()),
            ratio: BigRational::from_integer(ratio.into()),
        }
    }

    pub fn random(bound: u64, seed: u64) -> Self {
        Family::RandomInt { bound, seed }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Family::Ap { .. } => "ap",
            Family::Gp { .. } => "gp",
            Family::RandomInt { .. } => "random_int",
            Family::Squares { .. } => "squares",
            Family::CustomFile { .. } => "custom_file",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Ap { start, step } => write!(f, "ap(start={start},step={step})"),
            Family::Gp { start, ratio } => write!(f, "gp(start={start},ratio={ratio})"),
            Family::RandomInt { bound, seed } => write!(f, "random_int(bound={bound},seed={seed})"),
            Family::Squares { start } => write!(f, "squares(start={start})"),
            Family::CustomFile { path } => write!(f, "custom_file({})", path.display()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: Family,
    pub n: usize,
}

impl FamilySpec {
    pub fn new(family: Family, n: usize) -> Self {
        FamilySpec { family, n }
    }
}

pub const DEFAULT_RANDOM_BOUND: u64 = 1_000_000;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub fn generate(spec: &FamilySpec) -> Result<InputSet> {
    let n = spec.n;
    if n == 0 {
        return Err(invalid("family size must be at least 1"));
    }
    let values: Vec<BigRational> = match &spec.family {
        Family::Ap { start, step } => {
            if step.is_zero() {
                return Err(invalid("ap step must be nonzero"));
            }
            (0..n)
                .map(|i| start + step * BigRational::from_integer(BigInt::from(i)))
                .collect()
        }
        Family::Gp { start, ratio } => {
            if start.is_zero() {
                return Err(invalid("gp start must be nonzero"));
            }
            if ratio.is_zero() || ratio.is_one() || *ratio == -BigRational::one() {
                return Err(invalid(format!(
                    "gp ratio {ratio} does not give distinct terms"
                )));
            }
            std::iter::successors(Some(start.clone()), |x| Some(x * ratio))
                .take(n)
                .collect()
        }
        Family::RandomInt { bound, seed } => {
            if (n as u64) > *bound {
                return Err(invalid(format!(
                    "cannot draw {n} distinct integers from [1, {bound}]"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut seen = BTreeSet::new();
            let mut out = Vec::with_capacity(n);
            while out.len() < n {
                let x: u64 = rng.gen_range(1..=*bound);
                if seen.insert(x) {
                    out.push(BigRational::from_integer(x.into()));
                }
            }
            out
        }
        Family::Squares { start } => (0..n as u64)
            .map(|i| {
                let r = BigInt::from(start + i);
                BigRational::from_integer(&r * &r)
            })
            .collect(),
        Family::CustomFile { path } => {
            let values = read_set_file_ordered(path)?;
            if values.len() < n {
                return Err(invalid(format!(
                    "{} holds {} values, {n} requested",
                    path.display(),
                    values.len()
                )));
            }
            values.into_iter().take(n).collect()
        }
    };
    InputSet::new(values.into_iter().map(ExtRational::Finite))
}

/// Parses a set file: one `p/q` or integer per line, `#` starts a comment,
/// blank lines are ignored. Repeated values are an error. Values are
/// returned in file order.
pub fn parse_set_values(text: &str) -> Result<Vec<BigRational>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line, message };
        let value = match ExtRational::from_str(body) {
            Ok(ExtRational::Finite(v)) => v,
            Ok(ExtRational::Infinity) => return Err(parse_err("infinity is not allowed".into())),
            Err(e) => return Err(parse_err(e.to_string())),
        };
        if !seen.insert(value.clone()) {
            return Err(parse_err(format!("duplicate value {value}")));
        }
        out.push(value);
    }
    Ok(out)
}

pub fn parse_set_file(text: &str) -> Result<InputSet> {
    InputSet::new(parse_set_values(text)?.into_iter().map(ExtRational::Finite))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))
}

fn read_set_file_ordered(path: &Path) -> Result<Vec<BigRational>> {
    parse_set_values(&read_text(path)?)
}

pub fn read_set_file(path: &Path) -> Result<InputSet> {
    parse_set_file(&read_text(path)?)
}

pub fn format_set_file(set: &InputSet) -> String {
    set.elements().iter().map(|x| format!("{x}\n")).collect()
}

/// One scan measurement. Serialized fields are the CSV columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthRecord {
    pub family: String,
    pub kind: String,
    pub n: usize,
    pub function: Expander,
    pub image_count: u64,
    pub skipped: u64,
    pub elapsed_ms: u64,
    #[serde(skip)]
    pub tuple_count: u64,
    #[serde(skip)]
    pub energy: u128,
}

pub const CSV_HEADER: &str = "family,kind,n,function,image_count,skipped,elapsed_ms";

pub fn measure(
    function: Expander,
    family: &Family,
    n: usize,
    caps: &ImageCaps,
) -> Result<GrowthRecord> {
    caps.check(function, n)?;
    let set = generate(&FamilySpec::new(family.clone(), n))?;
    let start = Instant::now();
    let count = image_count(function, &set, caps)?;
    Ok(GrowthRecord {
        family: family.to_string(),
        kind: family.kind().to_string(),
        n,
        function,
        image_count: count.image_count,
        skipped: count.skipped,
        elapsed_ms: start.elapsed().as_millis() as u64,
        tuple_count: count.tuple_count,
        energy: count.energy,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RejectedSize {
    pub n: usize,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScanOutcome {
    pub records: Vec<GrowthRecord>,
    pub rejected: Vec<RejectedSize>,
}

/// Measures `|function(A)|` for each size. Sizes over the cap are reported
/// in `rejected` and the rest of the scan continues.
pub fn scan(
    function: Expander,
    family: &Family,
    sizes: &[usize],
    caps: &ImageCaps,
) -> Result<ScanOutcome> {
    let mut out = ScanOutcome::default();
    for &n in sizes {
        match measure(function, family, n, caps) {
            Ok(r) => out.records.push(r),
            Err(e @ Error::CapExceeded { .. }) => out.rejected.push(RejectedSize {
                n,
                reason: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `count ≈ C·n^e`
    PurePower,
    /// `count ≈ C·n^e / ln n`
    PowerOverLog,
}

impl FromStr for FitModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pure" | "pure_power" => Ok(FitModel::PurePower),
            "powerlog" | "power_over_log" => Ok(FitModel::PowerOverLog),
            _ => Err(invalid(format!("unknown fit model {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentFit {
    pub model: FitModel,
    /// Fitted exponent `1 + δ`.
    pub exponent: f64,
    pub delta: f64,
    pub constant: f64,
    /// Largest absolute residual in log space.
    pub residual: f64,
    pub points: usize,
    /// Logarithms are natural.
    pub log_base: &'static str,
}

/// Least-squares fit of `ln count` (plus `ln ln n` for the log model)
/// against `ln n`.
pub fn fit_points(points: &[(usize, u64)], model: FitModel) -> Result<ExponentFit> {
    let sizes: BTreeSet<usize> = points.iter().map(|p| p.0).collect();
    if points.len() < 3 || sizes.len() != points.len() {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: sizes.len(),
        });
    }
    if let Some(p) = points.iter().find(|p| p.1 == 0 || p.0 < 2) {
        return Err(invalid(format!(
            "cannot fit a point with n = {}, count = {}",
            p.0, p.1
        )));
    }
    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|&(n, c)| {
            let x = (n as f64).ln();
            let y = (c as f64).ln()
                + match model {
                    FitModel::PurePower => 0.0,
                    FitModel::PowerOverLog => x.ln(),
                };
            (x, y)
        })
        .collect();
    let k = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / k;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = xy
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).abs())
        .fold(0.0, f64::max);
    Ok(ExponentFit {
        model,
        exponent: slope,
        delta: slope - 1.0,
        constant: intercept.exp(),
        residual,
        points: xy.len(),
        log_base: "e",
    })
}

pub fn fit_exponent(records: &[GrowthRecord], model: FitModel) -> Result<ExponentFit> {
    let points: Vec<(usize, u64)> = records.iter().map(|r| (r.n, r.image_count)).collect();
    fit_points(&points, model)
}

/// `|f(A)|·ln n / n²`, `|g(A)| / n²`, `|h(A)|·ln n / n⁴`: the image size
/// divided by its lower-bound shape.
pub fn normalized_growth(function: Expander, n: usize, count: u64) -> f64 {
    let (n, c) = (n as f64, count as f64);
    match function {
        Expander::F => c * n.ln() / n.powi(2),
        Expander::G => c / n.powi(2),
        Expander::H => c * n.ln() / n.powi(4),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthFloor {
    pub ratios: Vec<(usize, f64)>,
    pub first: f64,
    pub min: f64,
    /// `min ≥ first / 2`.
    pub holds: bool,
}

/// Whether the normalized growth never drops below half its value at the
/// smallest scanned size.
pub fn growth_floor(records: &[GrowthRecord]) -> Option<GrowthFloor> {
    let mut ratios: Vec<(usize, f64)> = records
        .iter()
        .map(|r| (r.n, normalized_growth(r.function, r.n, r.image_count)))
        .collect();
    ratios.sort_by_key(|r| r.0);
    let first = ratios.first()?.1;
    let min = ratios.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    Some(GrowthFloor {
        holds: min >= first / 2.0,
        ratios,
        first,
        min,
    })
}

pub fn write_csv<W: io::Write>(records: &[GrowthRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io_err = |e: csv::Error| invalid(format!("csv: {e}"));
    if records.is_empty() {
        w.write_record(CSV_HEADER.split(',')).map_err(io_err)?;
    }
    for r in records {
        w.serialize(r).map_err(io_err)?;
    }
    w.flush().map_err(|e| invalid(format!("csv: {e}")))?;
    Ok(())
}

/// The records as a JSON array with the CSV columns as keys.
pub fn write_json<W: io::Write>(records: &[GrowthRecord], out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, records).map_err(|e| invalid(format!("json: {e}")))
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<GrowthRecord>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| invalid(format!("csv: {e}")))
}
