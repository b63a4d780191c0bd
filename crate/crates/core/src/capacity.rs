//! The capacity staircase below `tau^4` and the catalog of known stabilized
//! capacity values and bounds.
//!
//! On `[1, tau^4)` the unstabilized capacity `c0` is a Fibonacci staircase:
//! linear stretches `x -> slope * x` alternate with constant steps, all
//! numerics governed by the odd-index Fibonacci numbers. The stabilized
//! functions `c_k`, `k >= 1`, agree with `c0` there; above `tau^4` only a
//! catalog of exact points and a global upper bound `3x/(x+1)` are known,
//! and everything else is reported as a bounds pair.
//!
//! Step `i >= 0` of the staircase is constant at `v_i = f(2i+3)/f(2i+1)` on
//! `[a_i, v_i^2]` with `a_i = f(2i+3)/f(2i-1)`, followed by a linear stretch
//! of slope `f(2i+1)/f(2i+3)` up to `a_(i+1)`. The opening segment on
//! `[1, 2]` is the `i = -1` case with the seed `f(-1) = 1`; that indexing is
//! a reconstruction forced by continuity from `c0(1) = 1` and `c0(2) = 2`,
//! one step before where the step family is usually started.

use std::cmp::Ordering;

use num_rational::Ratio;
use num_traits::{One, Signed};

use crate::exact::{cmp_tau4, format_ratio, int, rat_int, ratio_approx, Scalar};
use crate::Error;

/// How far the membership searches over Fibonacci indices go by default.
/// Fibonacci growth makes larger indices unreachable for any input of
/// remotely printable size.
pub const DEFAULT_SEARCH_CAP: u32 = 64;

/// Lazily extended Fibonacci values, indexed from -1.
struct FibCache<T: Scalar> {
    vals: Vec<T>, // vals[k] = f(k - 1)
}

impl<T: Scalar> FibCache<T> {
    fn new() -> Self {
        FibCache {
            vals: vec![T::one(), T::zero()], // f(-1), f(0)
        }
    }

    fn get(&mut self, n: i32) -> T {
        assert!(n >= -1, "fib index out of range");
        let idx = (n + 1) as usize;
        while self.vals.len() <= idx {
            let k = self.vals.len();
            let next = self.vals[k - 1].clone() + self.vals[k - 2].clone();
            self.vals.push(next);
        }
        self.vals[idx].clone()
    }

    fn quot(&mut self, num_idx: i32, den_idx: i32) -> Ratio<T> {
        Ratio::new(self.get(num_idx), self.get(den_idx))
    }
}

/// One maximal interval on which the staircase is linear or constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PieceKind<T: Scalar> {
    Linear { slope: Ratio<T> },
    Constant { value: Ratio<T> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StaircasePiece<T: Scalar> {
    pub lo: Ratio<T>,
    pub hi: Ratio<T>,
    pub kind: PieceKind<T>,
}

impl<T: Scalar> StaircasePiece<T> {
    pub fn value_at(&self, x: &Ratio<T>) -> Ratio<T> {
        match &self.kind {
            PieceKind::Linear { slope } => slope.clone() * x,
            PieceKind::Constant { value } => value.clone(),
        }
    }

    pub fn contains(&self, x: &Ratio<T>) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            PieceKind::Linear { .. } => "linear",
            PieceKind::Constant { .. } => "constant",
        }
    }

    /// The slope of a linear piece, or the value of a constant one.
    pub fn parameter(&self) -> &Ratio<T> {
        match &self.kind {
            PieceKind::Linear { slope } => slope,
            PieceKind::Constant { value } => value,
        }
    }
}

/// The first `max_steps` constant steps of the staircase, together with the
/// linear stretches joining them, tiling `[1, a_(max_steps)]` continuously.
pub fn c0_staircase<T: Scalar>(max_steps: u32) -> Vec<StaircasePiece<T>> {
    let mut fibs = FibCache::new();
    let mut pieces = Vec::with_capacity(2 * max_steps as usize + 1);
    pieces.push(StaircasePiece {
        lo: Ratio::one(),
        hi: rat_int(2),
        kind: PieceKind::Linear {
            slope: Ratio::one(),
        },
    });
    for i in 0..max_steps as i32 {
        let a = fibs.quot(2 * i + 3, 2 * i - 1);
        let v = fibs.quot(2 * i + 3, 2 * i + 1);
        let a_next = fibs.quot(2 * i + 5, 2 * i + 1);
        pieces.push(StaircasePiece {
            lo: a,
            hi: v.clone() * v.clone(),
            kind: PieceKind::Constant { value: v.clone() },
        });
        pieces.push(StaircasePiece {
            lo: v.clone() * v,
            hi: a_next,
            kind: PieceKind::Linear {
                slope: fibs.quot(2 * i + 1, 2 * i + 3),
            },
        });
    }
    pieces
}

/// CSV rows `lo,hi,kind,parameter` with exact rational strings.
pub fn staircase_csv<T: Scalar>(pieces: &[StaircasePiece<T>]) -> String {
    let mut out = String::from("lo,hi,kind,parameter\n");
    for p in pieces {
        out.push_str(&format!(
            "{},{},{},{}\n",
            format_ratio(&p.lo),
            format_ratio(&p.hi),
            p.kind_name(),
            format_ratio(p.parameter())
        ));
    }
    out
}

/// An exact capacity value: a rational, or the square root of a rational on
/// the volume-constrained range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CapValue<T: Scalar> {
    Rational(Ratio<T>),
    Sqrt(Ratio<T>),
}

impl<T: Scalar> CapValue<T> {
    /// `sqrt(x)`, collapsed to a rational when `x` is a perfect square.
    pub fn sqrt_of(x: Ratio<T>) -> Self {
        assert!(!x.is_negative(), "square root of a negative rational");
        let sn = x.numer().sqrt();
        let sd = x.denom().sqrt();
        if &(sn.clone() * sn.clone()) == x.numer() && &(sd.clone() * sd.clone()) == x.denom() {
            CapValue::Rational(Ratio::new(sn, sd))
        } else {
            CapValue::Sqrt(x)
        }
    }

    pub fn as_rational(&self) -> Option<&Ratio<T>> {
        match self {
            CapValue::Rational(r) => Some(r),
            CapValue::Sqrt(_) => None,
        }
    }

    pub fn approx(&self) -> f64 {
        match self {
            CapValue::Rational(r) => ratio_approx(r),
            CapValue::Sqrt(r) => ratio_approx(r).sqrt(),
        }
    }
}

impl<T: Scalar> std::fmt::Display for CapValue<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CapValue::Rational(r) => write!(f, "{}", format_ratio(r)),
            CapValue::Sqrt(r) => write!(f, "sqrt({})", format_ratio(r)),
        }
    }
}

/// What is known about a stabilized capacity value at a point: an exact
/// value with its provenance, or a bounds pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KnownResult<T: Scalar> {
    Exact {
        value: CapValue<T>,
        source: String,
    },
    Bounds {
        lower: Ratio<T>,
        upper: Ratio<T>,
        lower_source: String,
        upper_source: String,
    },
}

/// `c0(x)` for rational `x >= 1`.
///
/// Below `tau^4` this is the staircase; at and above `(17/6)^2 = 289/36` it
/// is the volume constraint `sqrt(x)`. In between lies a transitional region
/// whose finitely many linear pieces are not recorded here, so evaluation
/// there is refused rather than guessed.
pub fn c0<T: Scalar>(x: &Ratio<T>) -> Result<CapValue<T>, Error> {
    if x < &Ratio::one() {
        return Err(Error::Domain(format!(
            "c0 is defined for x >= 1, got {}",
            format_ratio(x)
        )));
    }
    if cmp_tau4(x) == Ordering::Less {
        return Ok(CapValue::Rational(staircase_value(x)));
    }
    let vol_edge = Ratio::new(int::<T>(289), int::<T>(36));
    if x >= &vol_edge {
        Ok(CapValue::sqrt_of(x.clone()))
    } else {
        Err(Error::UnsupportedRegion(format!(
            "{} lies in the transitional region tau^4 < x < 289/36, \
             where c0 has no recorded closed form",
            format_ratio(x)
        )))
    }
}

/// Staircase evaluation; requires `1 <= x < tau^4`.
fn staircase_value<T: Scalar>(x: &Ratio<T>) -> Ratio<T> {
    if x <= &rat_int(2) {
        return x.clone();
    }
    let mut fibs = FibCache::new();
    let mut i = 0;
    loop {
        let v = fibs.quot(2 * i + 3, 2 * i + 1);
        if x <= &(v.clone() * v.clone()) {
            return v;
        }
        let a_next = fibs.quot(2 * i + 5, 2 * i + 1);
        if x <= &a_next {
            return fibs.quot(2 * i + 1, 2 * i + 3) * x;
        }
        i += 1;
    }
}

/// The folding upper bound `3x/(x+1)`.
fn folding_bound<T: Scalar>(x: &Ratio<T>) -> Ratio<T> {
    rat_int::<T>(3) * x / (x + Ratio::one())
}

/// What is known about `c_k(x)` for `k >= 1`, searching the point families
/// with the default index cap.
pub fn ck_known<T: Scalar>(x: &Ratio<T>, k: u32) -> Result<KnownResult<T>, Error> {
    ck_known_with_cap(x, k, DEFAULT_SEARCH_CAP)
}

/// As [`ck_known`], with an explicit cap on the Fibonacci-index searches.
///
/// No recorded value distinguishes different `k >= 1`, so the result is
/// independent of `k`.
pub fn ck_known_with_cap<T: Scalar>(
    x: &Ratio<T>,
    k: u32,
    cap: u32,
) -> Result<KnownResult<T>, Error> {
    if k == 0 {
        return Err(Error::Domain(
            "k must be >= 1 (k = 0 is the unstabilized function; use c0)".into(),
        ));
    }
    if x < &Ratio::one() {
        return Err(Error::Domain(format!(
            "c_k is defined for x >= 1, got {}",
            format_ratio(x)
        )));
    }
    if cmp_tau4(x) == Ordering::Less {
        return Ok(KnownResult::Exact {
            value: CapValue::Rational(staircase_value(x)),
            source: "capacity staircase, stabilized on [1, tau^4)".into(),
        });
    }
    let upper = folding_bound(x);
    if let Some(source) = exact_point_source(x, cap) {
        return Ok(KnownResult::Exact {
            value: CapValue::Rational(upper),
            source,
        });
    }
    let (lower, lower_source) = best_known_below(x, cap);
    Ok(KnownResult::Bounds {
        lower,
        upper,
        lower_source,
        upper_source: "folding upper bound 3x/(x+1)".into(),
    })
}

/// Is `x > tau^4` one of the points where `c_k = 3x/(x+1)` exactly?
fn exact_point_source<T: Scalar>(x: &Ratio<T>, cap: u32) -> Option<String> {
    if let Some(m) = as_3m_minus_1(x) {
        return Some(format!("integer point x = 3m-1 with m = {m}"));
    }
    let mut fibs = FibCache::new();
    for i in 0..=cap as i32 {
        let q = fibs.quot(4 * i + 6, 4 * i + 2);
        match q.cmp(x) {
            Ordering::Equal => {
                return Some(format!("Fibonacci quotient point f(4i+6)/f(4i+2), i = {i}"))
            }
            // the quotients decrease toward tau^4, so once below x
            // nothing later can match
            Ordering::Less => break,
            Ordering::Greater => {}
        }
    }
    None
}

/// `x = 3m - 1` for an integer `m >= 1`?
fn as_3m_minus_1<T: Scalar>(x: &Ratio<T>) -> Option<T> {
    if !x.is_integer() {
        return None;
    }
    let n = x.to_integer();
    let three = int::<T>(3);
    let succ = n + T::one();
    if succ.is_multiple_of(&three) {
        let m = succ / three;
        (m >= T::one()).then_some(m)
    } else {
        None
    }
}

/// Largest recorded exact value at a point `<= x`, used as a monotonicity
/// lower bound for `x > tau^4`. Every candidate value has the form
/// `3p/(p+1)`, increasing in `p`, so the search keeps the largest point of
/// each family.
fn best_known_below<T: Scalar>(x: &Ratio<T>, cap: u32) -> (Ratio<T>, String) {
    let mut best: Option<(Ratio<T>, Ratio<T>)> = None; // (point, value)
    let mut consider = |point: Ratio<T>| {
        let value = folding_bound(&point);
        match &best {
            Some((_, v)) if v >= &value => {}
            _ => best = Some((point, value)),
        }
    };

    // largest integer 3m-1 <= x
    let mut n = x.floor().to_integer();
    let three = int::<T>(3);
    while n >= int::<T>(2) {
        if (n.clone() + T::one()).is_multiple_of(&three) {
            consider(Ratio::from_integer(n));
            break;
        }
        n = n - T::one();
    }

    // largest Fibonacci quotient f(4i+6)/f(4i+2) <= x: the quotients
    // decrease with i, so the first one at or below x wins
    let mut fibs = FibCache::new();
    for i in 0..=cap as i32 {
        let q = fibs.quot(4 * i + 6, 4 * i + 2);
        if &q <= x {
            consider(q);
            break;
        }
    }

    // staircase left endpoints march up to tau^4 < x; the deepest one in
    // the search range carries the largest value
    let deep = cap as i32;
    consider(fibs.quot(2 * deep + 3, 2 * deep - 1));

    let (point, value) = best.expect("catalog is never empty");
    (
        value,
        format!(
            "monotonicity from the exact value at x = {}",
            format_ratio(&point)
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_ratio;
    use crate::{Int, Rat};

    fn rt(s: &str) -> Rat {
        parse_ratio(s).unwrap()
    }

    fn staircase(n: u32) -> Vec<StaircasePiece<Int>> {
        c0_staircase::<Int>(n)
    }

    #[test]
    fn first_steps_match_the_fibonacci_data() {
        let pieces = staircase(3);
        assert_eq!(pieces.len(), 7);
        // opening segment c0(x) = x on [1, 2]
        assert_eq!(pieces[0].lo, rt("1"));
        assert_eq!(pieces[0].hi, rt("2"));
        assert_eq!(pieces[0].value_at(&rt("3/2")), rt("3/2"));
        // step 0: constant 2 on [2, 4]
        assert_eq!(pieces[1].lo, rt("2"));
        assert_eq!(pieces[1].hi, rt("4"));
        assert_eq!(pieces[1].parameter(), &rt("2"));
        // step 1: constant 5/2 with left endpoint 5
        assert_eq!(pieces[3].lo, rt("5"));
        assert_eq!(pieces[3].parameter(), &rt("5/2"));
        // step 2: constant 13/5 with left endpoint 13/2
        assert_eq!(pieces[5].lo, rt("13/2"));
        assert_eq!(pieces[5].parameter(), &rt("13/5"));
    }

    #[test]
    fn staircase_is_continuous_and_nondecreasing() {
        let pieces = staircase(12);
        for w in pieces.windows(2) {
            assert_eq!(w[0].hi, w[1].lo, "pieces must tile the interval");
            assert_eq!(
                w[0].value_at(&w[0].hi),
                w[1].value_at(&w[1].lo),
                "values must agree at the junction"
            );
        }
        // each constant value squares to its right endpoint
        for p in &pieces {
            if let PieceKind::Constant { value } = &p.kind {
                assert_eq!(value.clone() * value.clone(), p.hi);
            }
        }
    }

    #[test]
    fn c0_spot_values() {
        assert_eq!(c0(&rt("1")).unwrap(), CapValue::Rational(rt("1")));
        assert_eq!(c0(&rt("2")).unwrap(), CapValue::Rational(rt("2")));
        assert_eq!(c0(&rt("3")).unwrap(), CapValue::Rational(rt("2")));
        assert_eq!(c0(&rt("5")).unwrap(), CapValue::Rational(rt("5/2")));
        assert_eq!(c0(&rt("13/2")).unwrap(), CapValue::Rational(rt("13/5")));
        // linear stretch between steps 0 and 1: slope 1/2 on [4, 5]
        assert_eq!(c0(&rt("9/2")).unwrap(), CapValue::Rational(rt("9/4")));
        // volume range
        assert_eq!(c0(&rt("9")).unwrap(), CapValue::Rational(rt("3")));
        assert_eq!(c0(&rt("10")).unwrap(), CapValue::Sqrt(rt("10")));
        assert_eq!(c0(&rt("289/36")).unwrap(), CapValue::Rational(rt("17/6")));
        // transitional region is refused
        assert!(matches!(c0(&rt("7")), Err(Error::UnsupportedRegion(_))));
        assert!(matches!(c0(&rt("48/7")), Err(Error::UnsupportedRegion(_))));
        assert!(matches!(c0(&rt("1/2")), Err(Error::Domain(_))));
    }

    #[test]
    fn ck_exact_points() {
        let exact_val = |r: KnownResult<Int>| match r {
            KnownResult::Exact { value, .. } => value,
            other => panic!("expected Exact, got {other:?}"),
        };
        assert_eq!(
            exact_val(ck_known(&rt("8"), 1).unwrap()),
            CapValue::Rational(rt("8/3"))
        );
        assert_eq!(
            exact_val(ck_known(&rt("2"), 5).unwrap()),
            CapValue::Rational(rt("2"))
        );
        assert_eq!(
            exact_val(ck_known(&rt("5"), 1).unwrap()),
            CapValue::Rational(rt("5/2"))
        );
        assert_eq!(
            exact_val(ck_known(&rt("55/8"), 1).unwrap()),
            CapValue::Rational(rt("55/21"))
        );
        assert_eq!(
            exact_val(ck_known(&rt("377/55"), 1).unwrap()),
            CapValue::Rational(rt("377/144"))
        );
        // x = 3 f(6) - 1 = 23 is an integer point like any other
        assert_eq!(
            exact_val(ck_known(&rt("23"), 1).unwrap()),
            CapValue::Rational(rt("23/8"))
        );
        // independence of k
        assert_eq!(
            ck_known(&rt("8"), 1).unwrap(),
            ck_known(&rt("8"), 7).unwrap()
        );
        assert!(ck_known(&rt("8"), 0).is_err());
        // the whole integer family: c_k(3m-1) = (3m-1)/m = 3x/(x+1)
        for m in 1i64..=12 {
            let x = Rat::from_integer(crate::Int::from(3 * m - 1));
            let want = Rat::new(crate::Int::from(3 * m - 1), crate::Int::from(m));
            assert_eq!(want, folding_bound(&x), "m = {m}");
            assert_eq!(
                exact_val(ck_known(&x, 1).unwrap()),
                CapValue::Rational(want),
                "m = {m}"
            );
        }
    }

    #[test]
    fn ck_bounds_between_known_points() {
        // x = 7 sits between the Fibonacci quotient 55/8 and the integer 8
        match ck_known(&rt("7"), 1).unwrap() {
            KnownResult::Bounds { lower, upper, .. } => {
                assert_eq!(upper, rt("21/8"));
                assert_eq!(lower, rt("55/21"));
                assert!(lower < upper);
            }
            other => panic!("expected Bounds, got {other:?}"),
        }
        // far out the integer family dominates
        match ck_known(&rt("100"), 1).unwrap() {
            KnownResult::Bounds { lower, upper, .. } => {
                assert_eq!(upper, rt("300/101"));
                assert_eq!(lower, rt("98/33")); // from x = 98 = 3*33 - 1
            }
            other => panic!("expected Bounds, got {other:?}"),
        }
    }

    #[test]
    fn csv_shape() {
        let csv = staircase_csv(&staircase(1));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "lo,hi,kind,parameter");
        assert_eq!(lines[1], "1,2,linear,1");
        assert_eq!(lines[2], "2,4,constant,2");
        assert_eq!(lines[3], "4,5,linear,1/2");
    }
}
