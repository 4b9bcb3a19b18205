//! Transformations as points of projective 3-space.
//!
//! `[p, q, r, s]` is sent to the projective point with those homogeneous
//! coordinates. A transformation sends `a` to `b` exactly when
//! `a·p + q − a·b·r − b·s = 0`, so for each label `(a, b)` the
//! transformations with `t(a) = b` form the plane with coefficient vector
//! `[a, 1, −a·b, −b]`.
//!
//! Intersections are classified by exact rank over ℚ. Lines are stored as
//! the reduced row-echelon form of the two planes that cut them out, which
//! depends only on the line.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_arith::{canonical_projective, clear_denominators, ExtRational};
use crate::expander_sets::InputSet;
use crate::projective::{solve_triple, Mobius};

/// A point of projective 3-space in canonical integer coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint3([BigInt; 4]);

impl ProjPoint3 {
    pub fn new(coords: [BigInt; 4]) -> Result<Self> {
        let c = canonical_projective(coords.to_vec())?;
        Ok(ProjPoint3(c.try_into().expect("four coordinates")))
    }

    pub fn from_i64(coords: [i64; 4]) -> Result<Self> {
        Self::new(coords.map(BigInt::from))
    }

    pub fn coords(&self) -> &[BigInt; 4] {
        &self.0
    }

    /// Whether the point lies on `p·s = q·r`, the degenerate matrices.
    pub fn on_quadric(&self) -> bool {
        let [p, q, r, s] = &self.0;
        p * s == q * r
    }

    /// The transformation this point represents, unless it is on the quadric.
    pub fn to_mobius(&self) -> Option<Mobius> {
        Mobius::from_entries(self.0.clone()).ok()
    }
}

impl fmt::Display for ProjPoint3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [p, q, r, s] = &self.0;
        write!(f, "[{p}, {q}, {r}, {s}]")
    }
}

pub fn embed(t: &Mobius) -> ProjPoint3 {
    // Mobius is already canonical with the same normalization.
    ProjPoint3(t.entries().map(|e| e.clone()))
}

pub fn on_quadric(pt: &ProjPoint3) -> bool {
    pt.on_quadric()
}

/// The plane of transformations sending `a` to `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DualPlane {
    pub a: BigRational,
    pub b: BigRational,
    coeffs: [BigInt; 4],
}

impl DualPlane {
    pub fn coefficients(&self) -> &[BigInt; 4] {
        &self.coeffs
    }

    pub fn label(&self) -> (&BigRational, &BigRational) {
        (&self.a, &self.b)
    }
}

pub fn plane_for(a: &ExtRational, b: &ExtRational) -> Result<DualPlane> {
    let (a, b) = (a.finite()?.clone(), b.finite()?.clone());
    let raw = clear_denominators(&[a.clone(), BigRational::one(), -(&a * &b), -b.clone()]);
    let coeffs = canonical_projective(raw)?
        .try_into()
        .expect("four coefficients");
    Ok(DualPlane { a, b, coeffs })
}

fn dot(pt: &ProjPoint3, plane: &DualPlane) -> BigInt {
    pt.0.iter().zip(&plane.coeffs).map(|(x, c)| x * c).sum()
}

pub fn incident(pt: &ProjPoint3, plane: &DualPlane) -> bool {
    dot(pt, plane).is_zero()
}

/// A line of projective 3-space as the reduced row-echelon basis of the
/// planes through it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjLine([[BigRational; 4]; 2]);

impl ProjLine {
    pub fn rows(&self) -> &[[BigRational; 4]; 2] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Intersection {
    Point(ProjPoint3),
    Line(Box<ProjLine>),
    Plane,
}

impl Intersection {
    pub fn kind(&self) -> &'static str {
        match self {
            Intersection::Point(_) => "point",
            Intersection::Line(_) => "line",
            Intersection::Plane => "plane",
        }
    }
}

/// Gauss–Jordan elimination over ℚ; returns the nonzero rows of the
/// reduced row-echelon form.
fn rref(rows: &[&[BigInt; 4]]) -> Vec<[BigRational; 4]> {
    let mut m: Vec<[BigRational; 4]> = rows
        .iter()
        .map(|r| (*r).clone().map(BigRational::from_integer))
        .collect();
    let mut rank = 0;
    for col in 0..4 {
        let Some(pivot) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = m[rank][col].recip();
        for x in m[rank].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != rank && !row[col].is_zero() {
                let factor = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &factor * p;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    m.truncate(rank);
    m
}

fn det3(m: [[&BigInt; 3]; 3]) -> BigInt {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// The null vector of a rank-3 system of three planes, by signed 3×3 minors.
fn kernel_point(rows: [&[BigInt; 4]; 3]) -> Result<ProjPoint3> {
    let minor = |skip: usize| {
        let cols: Vec<usize> = (0..4).filter(|&c| c != skip).collect();
        det3(rows.map(|r| [&r[cols[0]], &r[cols[1]], &r[cols[2]]]))
    };
    ProjPoint3::new([minor(0), -minor(1), minor(2), -minor(3)])
}

/// The line shared by two distinct planes.
pub fn line_of(p1: &DualPlane, p2: &DualPlane) -> Result<ProjLine> {
    if p1.coeffs == p2.coeffs {
        return Err(Error::RepeatedEntry);
    }
    let rows = rref(&[&p1.coeffs, &p2.coeffs]);
    Ok(ProjLine(
        rows.try_into().expect("distinct planes have rank 2"),
    ))
}

pub fn triple_intersection_type(
    p1: &DualPlane,
    p2: &DualPlane,
    p3: &DualPlane,
) -> Result<Intersection> {
    let rows = [&p1.coeffs, &p2.coeffs, &p3.coeffs];
    if rows[0] == rows[1] || rows[1] == rows[2] || rows[0] == rows[2] {
        return Err(Error::RepeatedEntry);
    }
    let reduced = rref(&rows);
    Ok(match reduced.len() {
        3 => Intersection::Point(kernel_point(rows)?),
        2 => Intersection::Line(Box::new(ProjLine(reduced.try_into().expect("rank 2")))),
        _ => Intersection::Plane,
    })
}

/// All `|A|²` planes `π_ab`, ordered by label.
pub fn planes_of(set: &InputSet) -> Vec<DualPlane> {
    let xs = set.to_ext();
    xs.iter()
        .flat_map(|a| {
            xs.iter()
                .map(move |b| plane_for(a, b).expect("finite labels"))
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TripleCensus {
    pub triples: u64,
    pub point: u64,
    pub line: u64,
    pub plane: u64,
    /// Every triple of distinct planes meets in exactly one point.
    pub all_point: bool,
    /// Every triple meeting in a line has a common source or a common target.
    pub lines_share_source_or_target: bool,
    /// Triples whose sources are distinct and whose targets are distinct.
    pub general_position_triples: u64,
    /// Each such triple meets in one point off the quadric, equal to the
    /// embedded transformation solving the corresponding triple problem.
    pub general_position_witness_matches: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PairCensus {
    pub pairs: u64,
    pub distinct_lines: u64,
    pub all_distinct: bool,
    /// Pairs sharing a line all lie in a pencil with a common source or target.
    pub coincidences_share_source_or_target: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RichPointCensus {
    pub candidate_points: u64,
    pub max_incidence: u64,
    pub bound: u64,
    pub holds: bool,
}

/// Exhaustive check of the four plane-family properties over `{π_ab : a, b ∈ A}`:
/// triples meet in a point, labels give distinct planes, pairs give
/// distinct lines, and no transformation lies on more than `|A|` planes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlanesLemmaReport {
    pub set: Vec<String>,
    pub plane_count: u64,
    pub line_representation: &'static str,
    pub triples: TripleCensus,
    pub labels_injective: bool,
    pub distinct_planes: u64,
    pub pair_lines: PairCensus,
    pub rich_points: RichPointCensus,
}

impl PlanesLemmaReport {
    pub fn property1(&self) -> bool {
        self.triples.all_point
    }

    pub fn property2(&self) -> bool {
        self.labels_injective
    }

    pub fn property3(&self) -> bool {
        self.pair_lines.all_distinct
    }

    pub fn property4(&self) -> bool {
        self.rich_points.holds
    }

    /// All four properties in the form they are stated above.
    pub fn holds(&self) -> bool {
        self.property1() && self.property2() && self.property3() && self.property4()
    }
}

pub const DEFAULT_PLANES_CAP: usize = 6;

fn common_source_or_target(planes: &[&DualPlane]) -> bool {
    let same = |f: fn(&DualPlane) -> &BigRational| planes.windows(2).all(|w| f(w[0]) == f(w[1]));
    same(|p| &p.a) || same(|p| &p.b)
}

fn pairwise_distinct(xs: [&BigRational; 3]) -> bool {
    xs[0] != xs[1] && xs[1] != xs[2] && xs[0] != xs[2]
}

pub fn verify_planes_lemma(set: &InputSet, cap: usize) -> Result<PlanesLemmaReport> {
    if set.len() > cap {
        return Err(Error::CapExceeded {
            what: "planes lemma verification",
            size: set.len(),
            cap,
        });
    }
    let planes = planes_of(set);
    let m = planes.len();

    let distinct: BTreeSet<&[BigInt; 4]> = planes.iter().map(|p| &p.coeffs).collect();
    let labels_injective = distinct.len() == m;

    // Triples. Labels are distinct, so with injective labels the planes are too.
    let index_triples: Vec<(usize, usize, usize)> = (0..m)
        .flat_map(|i| (i + 1..m).flat_map(move |j| (j + 1..m).map(move |k| (i, j, k))))
        .collect();
    let per_triple: Vec<(Intersection, bool, Option<bool>)> = index_triples
        .par_iter()
        .map(|&(i, j, k)| {
            let t = [&planes[i], &planes[j], &planes[k]];
            let kind = triple_intersection_type(t[0], t[1], t[2]).expect("distinct planes");
            let shared = common_source_or_target(&t);
            let general = pairwise_distinct([&t[0].a, &t[1].a, &t[2].a])
                && pairwise_distinct([&t[0].b, &t[1].b, &t[2].b]);
            let witness = general.then(|| {
                let src = [&t[0].a, &t[1].a, &t[2].a].map(|x| ExtRational::Finite(x.clone()));
                let dst = [&t[0].b, &t[1].b, &t[2].b].map(|x| ExtRational::Finite(x.clone()));
                let w = embed(&solve_triple(&src, &dst).expect("distinct triples"));
                matches!(&kind, Intersection::Point(p) if *p == w && !p.on_quadric())
            });
            (kind, shared, witness)
        })
        .collect();

    let mut triples = TripleCensus {
        triples: per_triple.len() as u64,
        lines_share_source_or_target: true,
        general_position_witness_matches: true,
        ..TripleCensus::default()
    };
    let mut candidates = BTreeSet::new();
    for (kind, shared, witness) in &per_triple {
        match kind {
            Intersection::Point(p) => {
                triples.point += 1;
                if !p.on_quadric() {
                    candidates.insert(p.clone());
                }
            }
            Intersection::Line(_) => {
                triples.line += 1;
                triples.lines_share_source_or_target &= *shared;
            }
            Intersection::Plane => triples.plane += 1,
        }
        if let Some(ok) = witness {
            triples.general_position_triples += 1;
            triples.general_position_witness_matches &= *ok;
        }
    }
    triples.all_point = triples.point == triples.triples;

    // Pairs: group by line, then check every coincidence class.
    let mut by_line: BTreeMap<ProjLine, BTreeSet<usize>> = BTreeMap::new();
    let mut pairs = 0u64;
    for i in 0..m {
        for j in i + 1..m {
            if planes[i].coeffs == planes[j].coeffs {
                continue;
            }
            pairs += 1;
            let line = line_of(&planes[i], &planes[j])?;
            by_line.entry(line).or_default().extend([i, j]);
        }
    }
    // A line carried by a single pair has exactly two member planes.
    let coincidences_share_source_or_target = by_line
        .values()
        .filter(|members| members.len() > 2)
        .all(|members| {
            let ps: Vec<&DualPlane> = members.iter().map(|&i| &planes[i]).collect();
            common_source_or_target(&ps)
        });
    let pair_lines = PairCensus {
        pairs,
        distinct_lines: by_line.len() as u64,
        all_distinct: by_line.len() as u64 == pairs,
        coincidences_share_source_or_target,
    };

    let candidates: Vec<ProjPoint3> = candidates.into_iter().collect();
    let counts = incidence_counts(&candidates, &planes);
    let max_incidence = counts.degrees.iter().copied().max().unwrap_or(0) as u64;
    let bound = set.len() as u64;
    let rich_points = RichPointCensus {
        candidate_points: candidates.len() as u64,
        max_incidence,
        bound,
        holds: max_incidence <= bound,
    };

    Ok(PlanesLemmaReport {
        set: set.elements().iter().map(|x| x.to_string()).collect(),
        plane_count: m as u64,
        line_representation: "rref",
        triples,
        labels_injective,
        distinct_planes: distinct.len() as u64,
        pair_lines,
        rich_points,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IncidenceCounts {
    /// `I(P, Π)`.
    pub total: u64,
    /// Incidence degree of each point, in input order.
    pub degrees: Vec<usize>,
    /// `at_least[k]` is the number of points incident to at least `k` planes.
    pub at_least: Vec<u64>,
}

pub fn incidence_counts(points: &[ProjPoint3], planes: &[DualPlane]) -> IncidenceCounts {
    let degrees: Vec<usize> = points
        .par_iter()
        .map(|p| planes.iter().filter(|pl| incident(p, pl)).count())
        .collect();
    let max = degrees.iter().copied().max().unwrap_or(0);
    let mut at_least = vec![0u64; max + 1];
    for &d in &degrees {
        for slot in &mut at_least[..=d] {
            *slot += 1;
        }
    }
    IncidenceCounts {
        total: degrees.iter().map(|&d| d as u64).sum(),
        degrees,
        at_least,
    }
}

/// `|Π|³/k⁵ + |Π|/k`, the rich-point bound for planes with no three on a line.
pub fn rich_plane_shape(plane_count: usize, k: usize) -> f64 {
    let (m, k) = (plane_count as f64, k as f64);
    m.powi(3) / k.powi(5) + m / k
}

/// `|L|²/k³ + |L|/k`, the rich-point bound for lines in a plane.
pub fn rich_line_shape(line_count: usize, k: usize) -> f64 {
    let (m, k) = (line_count as f64, k as f64);
    m.powi(2) / k.powi(3) + m / k
}

/// Smallest `C` with `at_least[k] ≤ C · shape(k)` for every `k ≥ 1`.
pub fn fitted_constant(counts: &IncidenceCounts, shape: impl Fn(usize) -> f64) -> f64 {
    counts
        .at_least
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c as f64 / shape(k))
        .fold(0.0, f64::max)
}
