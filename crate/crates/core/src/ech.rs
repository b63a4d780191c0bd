//! ECH gradings via exact lattice-point counts, ECH partitions via extremal
//! lattice paths, obstruction-bundle gluing weights, and the cylinder
//! rule-out verdicts built from them.
//!
//! The grading of the `p`-fold short orbit at parameter `z` counts lattice
//! points in the triangle with vertices `(0,0)`, `(p,0)`, `(0, p/z)`:
//!
//! ```text
//! 1 + gr/2 = #{ (a, b) : a, b >= 0 integers, a + z*b <= p }
//! ```
//!
//! decided exactly with the tilt. The partitions attached to the ends of an
//! ECH curve are read off extremal lattice paths relative to the line of
//! slope `theta` (here always `theta = 1/parameter`):
//!
//! - negative end: the minimal convex lattice path from `(0,0)` to
//!   `(k, ceil(k*theta))` weakly above the line, broken at every lattice
//!   point it passes through;
//! - positive end: the maximal concave lattice path below the line, taken
//!   edge by edge. The two conventions are not mirror images: the negative
//!   path splits collinear runs, the positive one does not.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Signed;

use crate::exact::{int, int_over, PerturbedRat, Scalar};
use crate::Error;

/// A partition of a positive total, stored in canonical descending order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    parts: Vec<u32>,
    total: u64,
}

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Self {
        assert!(!parts.is_empty(), "a partition needs at least one part");
        assert!(parts.iter().all(|&p| p > 0), "parts must be positive");
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let total = parts.iter().map(|&p| p as u64).sum();
        Partition { parts, total }
    }

    pub fn single(s: u32) -> Self {
        Partition::new(vec![s])
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_single(&self) -> bool {
        self.parts.len() == 1
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// A polygonal chain through integer break points with strictly increasing
/// first coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePath {
    points: Vec<(i64, i64)>,
}

impl LatticePath {
    pub fn new(points: Vec<(i64, i64)>) -> Self {
        assert!(!points.is_empty());
        assert!(
            points.windows(2).all(|w| w[0].0 < w[1].0),
            "break points must have strictly increasing x"
        );
        LatticePath { points }
    }

    pub fn points(&self) -> &[(i64, i64)] {
        &self.points
    }

    /// Displacement vectors of the edges between consecutive break points.
    pub fn segments(&self) -> Vec<(i64, i64)> {
        self.points
            .windows(2)
            .map(|w| (w[1].0 - w[0].0, w[1].1 - w[0].1))
            .collect()
    }
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i128 {
    (a.0 - o.0) as i128 * (b.1 - o.1) as i128 - (a.1 - o.1) as i128 * (b.0 - o.0) as i128
}

/// Lower boundary of the convex hull of points sorted by x (strict turns
/// only; collinear middles are dropped).
fn lower_hull(pts: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &p in pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull
}

/// Upper boundary of the convex hull of points sorted by x.
fn upper_hull(pts: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &p in pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) >= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull
}

fn check_theta<T: Scalar>(theta: &PerturbedRat<T>) {
    assert!(
        theta.cmp_int(0) == Ordering::Greater && theta.cmp_int(1) == Ordering::Less,
        "monodromy angle must lie in (0, 1), got {theta}"
    );
}

/// `1 + gr/2` minus one: the half-grading of the `p`-fold short orbit at
/// parameter `z > 1`, by exact row-by-row lattice-point counting.
pub fn half_grading<T: Scalar>(p: u32, z: &PerturbedRat<T>) -> T {
    assert!(p > 0, "multiplicity must be positive");
    assert!(
        z.cmp_int(1) == Ordering::Greater,
        "grading parameter must exceed 1, got {z}"
    );
    // row b = 0: a = 0..p
    let mut count = int::<T>(p as u64 + 1);
    // rows b >= 1: p - b*z carries the flipped tilt of z throughout
    let tilt = z.tilt().flip();
    let mut rem = Ratio::from_integer(int::<T>(p as u64)) - z.base();
    while !rem.is_negative() {
        let f = PerturbedRat::new(rem.clone(), tilt).floor();
        if f >= T::zero() {
            count = count + f + T::one();
        }
        rem = rem - z.base();
    }
    count - T::one()
}

/// The minimal convex lattice path from `(0,0)` to `(k, ceil(k*theta))`
/// weakly above the line `x2 = theta * x1`, as its hull vertices.
pub fn lower_path_above<T: Scalar>(k: u32, theta: &PerturbedRat<T>) -> LatticePath {
    assert!(k > 0, "total multiplicity must be positive");
    check_theta(theta);
    let mut pts = Vec::with_capacity(k as usize + 1);
    pts.push((0i64, 0i64));
    let mut acc = theta.base().clone();
    for j in 1..=k as i64 {
        let h = PerturbedRat::new(acc.clone(), theta.tilt()).ceil();
        pts.push((j, h.to_i64().expect("path height overflows i64")));
        acc = acc + theta.base();
    }
    LatticePath::new(lower_hull(&pts))
}

/// The maximal concave lattice path from `(0,0)` to `(k, floor(k*theta))`
/// weakly below the line, as its hull vertices.
pub fn upper_path_below<T: Scalar>(k: u32, theta: &PerturbedRat<T>) -> LatticePath {
    assert!(k > 0, "total multiplicity must be positive");
    check_theta(theta);
    let mut pts = Vec::with_capacity(k as usize + 1);
    pts.push((0i64, 0i64));
    let mut acc = theta.base().clone();
    for j in 1..=k as i64 {
        let h = PerturbedRat::new(acc.clone(), theta.tilt()).floor();
        pts.push((j, h.to_i64().expect("path height overflows i64")));
        acc = acc + theta.base();
    }
    LatticePath::new(upper_hull(&pts))
}

/// ECH partition at a negative end of total multiplicity `k` around an orbit
/// with monodromy angle `theta`: the x-displacements of the minimal convex
/// path above the line, split at every lattice point on the path.
pub fn ech_partition_neg<T: Scalar>(k: u32, theta: &PerturbedRat<T>) -> Partition {
    let path = lower_path_above(k, theta);
    let mut parts = Vec::new();
    for (dx, dy) in path.segments() {
        let g = dx.gcd(&dy);
        for _ in 0..g {
            parts.push((dx / g) as u32);
        }
    }
    Partition::new(parts)
}

/// ECH partition at a positive end: the x-displacements of the edges of the
/// maximal concave path below the line (edges are not subdivided).
pub fn ech_partition_pos<T: Scalar>(k: u32, theta: &PerturbedRat<T>) -> Partition {
    let path = upper_path_below(k, theta);
    let parts = path.segments().iter().map(|&(dx, _)| dx as u32).collect();
    Partition::new(parts)
}

/// May curves be glued onto a trivial (unbranched) cover of the `s`-fold
/// short orbit at parameter `y`? Admissible exactly when the negative ECH
/// partition of `s` at angle `1/y` is the single part `(s)`.
pub fn trivial_glue_admissible<T: Scalar>(s: u32, y: &PerturbedRat<T>) -> bool {
    assert!(
        y.cmp_int(1) == Ordering::Greater,
        "ellipsoid parameter must exceed 1, got {y}"
    );
    let theta = y.recip().expect("y > 1 has nonzero base");
    ech_partition_neg(s, &theta).is_single()
}

/// The obstruction-bundle gluing weight `delta_theta(a, b) = b*ceil(a*theta)
/// - a*floor(b*theta)`.
pub fn gluing_delta<T: Scalar>(theta: &PerturbedRat<T>, a: u64, b: u64) -> T {
    check_theta(theta);
    int::<T>(b) * theta.scaled(a).ceil() - int::<T>(a) * theta.scaled(b).floor()
}

/// Gluing coefficient for a two-part configuration `(p1, p2)`, `p1 > p2`,
/// glued along the orbit with monodromy angle `theta`:
/// `delta(p2, p2) * delta(p1, p1 + p2)`.
///
/// Only the two-part case is modelled; coefficients for three or more parts
/// are deliberately unimplemented rather than guessed. Whether the pair
/// actually satisfies the neck condition at `1/theta` is the caller's
/// concern (the certificate verifier checks it for every neck).
pub fn gluing_coeff_two_parts<T: Scalar>(
    p1: u32,
    p2: u32,
    theta: &PerturbedRat<T>,
) -> Result<T, Error> {
    if p1 <= p2 || p2 == 0 {
        return Err(Error::UnsupportedPartition(format!(
            "two-part gluing coefficient needs p1 > p2 >= 1, got ({p1}, {p2})"
        )));
    }
    if !(theta.cmp_int(0) == Ordering::Greater && theta.cmp_int(1) == Ordering::Less) {
        return Err(Error::Domain(format!(
            "monodromy angle must lie in (0, 1), got {theta}"
        )));
    }
    Ok(gluing_delta(theta, p2 as u64, p2 as u64)
        * gluing_delta(theta, p1 as u64, p1 as u64 + p2 as u64))
}

/// The branched-cover condition for a neck trajectory with positive-end
/// partition `parts` over parameter `y`: `sum_i ceil(p_i/y) = ceil(s/y)`.
pub fn neck_condition<T: Scalar>(parts: &Partition, y: &PerturbedRat<T>) -> bool {
    assert!(
        y.cmp_int(1) == Ordering::Greater,
        "ellipsoid parameter must exceed 1, got {y}"
    );
    let mut sum = T::zero();
    for &p in parts.parts() {
        sum = sum + int_over(p as u64, y).expect("positive base").ceil();
    }
    sum == int_over(parts.total(), y).expect("positive base").ceil()
}

/// Which end of a cylinder a partition obstruction refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndSide {
    Top,
    Bottom,
}

/// Outcome of the ECH rule-out test for a cobordism cylinder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CylVerdict<T: Scalar> {
    /// A somewhere injective cylinder would have negative ECH index.
    ImpossibleNegIndex { ech_half_index: T },
    /// ECH index zero, but the end cannot carry its ECH partition.
    ImpossiblePartition { end: EndSide, expected: Partition },
    /// Nothing here excludes the cylinder.
    NotRuledOut,
}

impl<T: Scalar> fmt::Display for CylVerdict<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CylVerdict::ImpossibleNegIndex { ech_half_index } => {
                write!(f, "impossible: ECH half-index {ech_half_index} is negative")
            }
            CylVerdict::ImpossiblePartition { end, expected } => write!(
                f,
                "impossible: {} end would need ECH partition {expected}",
                match end {
                    EndSide::Top => "top",
                    EndSide::Bottom => "bottom",
                }
            ),
            CylVerdict::NotRuledOut => write!(f, "not ruled out"),
        }
    }
}

/// ECH rule-out test for a cylinder from the `s`-fold short orbit at `y`
/// (top) to the `t`-fold short orbit at `x` (bottom), `y < x`, `s <= t`.
///
/// A somewhere injective cylinder needs nonnegative ECH index
/// `gr(top) - gr(bottom)`; at index zero it must carry the ECH partitions at
/// its ends, and a cylinder end is a single multiplicity. The positive-end
/// partition test is opt-in: the negative-end test is the one exercised by
/// the recorded computations, the positive-end one is imported background.
pub fn cylinder_verdict<T: Scalar>(
    s: u32,
    y: &PerturbedRat<T>,
    t: u32,
    x: &PerturbedRat<T>,
    check_top: bool,
) -> Result<CylVerdict<T>, Error> {
    if s == 0 || t == 0 {
        return Err(Error::Domain("multiplicities must be positive".into()));
    }
    if y.cmp_int(1) != Ordering::Greater || x.cmp_int(1) != Ordering::Greater {
        return Err(Error::Domain(format!(
            "ellipsoid parameters must exceed 1, got {y} and {x}"
        )));
    }
    if y >= x {
        return Err(Error::Domain(format!(
            "top parameter must be smaller than bottom parameter, got {y} >= {x}"
        )));
    }
    if s > t {
        return Err(Error::Domain(format!(
            "top multiplicity cannot exceed bottom multiplicity, got {s} > {t}"
        )));
    }
    let diff = half_grading(s, y) - half_grading(t, x);
    if diff < T::zero() {
        return Ok(CylVerdict::ImpossibleNegIndex {
            ech_half_index: diff,
        });
    }
    if diff.is_zero() {
        let bottom = ech_partition_neg(t, &x.recip()?);
        if !bottom.is_single() {
            return Ok(CylVerdict::ImpossiblePartition {
                end: EndSide::Bottom,
                expected: bottom,
            });
        }
        if check_top {
            let top = ech_partition_pos(s, &y.recip()?);
            if !top.is_single() {
                return Ok(CylVerdict::ImpossiblePartition {
                    end: EndSide::Top,
                    expected: top,
                });
            }
        }
    }
    Ok(CylVerdict::NotRuledOut)
}
