//! Fredholm half-indices of punctured genus-zero curves in the completed
//! complement of an ellipsoid, half-indices of orbit cylinders, and the
//! action threshold such a curve forces on the ambient ball.
//!
//! For a genus-zero curve of degree `m` with negative ends of multiplicities
//! `t_i` on the short orbit and `r_j` on the long orbit of the boundary of
//! `E(1, x)`:
//!
//! ```text
//! ind/2 = -1 + 3m - sum_i (t_i + floor(t_i / x)) - sum_j (r_j + floor(r_j * x))
//! ```
//!
//! Degree-zero symplectization pieces (neck trajectories) have their own
//! formula and live in [`crate::building`]; this module covers curves in the
//! completed complement and pure orbit cylinders.

use num_rational::Ratio;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::exact::{int, int_over, PerturbedRat, Scalar, Tilt};
use crate::Error;

/// The two simple closed orbits on the boundary of `E(1, x)`, `x > 1`: the
/// short one bounds a disc of area 1, the long one a disc of area `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orbit {
    Short,
    Long,
}

/// A genus-zero curve shape: degree, ellipsoid parameter, and the negative
/// end multiplicities on each orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveSpec<T: Scalar> {
    pub degree: u32,
    pub param: PerturbedRat<T>,
    pub short_ends: Vec<u32>,
    pub long_ends: Vec<u32>,
}

/// A multiply covered closed orbit on a fixed ellipsoid boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitSpec<T: Scalar> {
    pub orbit: Orbit,
    pub mult: u32,
    pub param: PerturbedRat<T>,
}

/// `ind(C)/2` for a genus-zero curve in the completed complement.
pub fn half_index_curve<T: Scalar>(c: &CurveSpec<T>) -> T {
    let mut acc = int::<T>(3 * c.degree as u64) - T::one();
    for &t in &c.short_ends {
        acc = acc - int::<T>(t as u64) - floor_quot(t, &c.param);
    }
    for &r in &c.long_ends {
        acc = acc - int::<T>(r as u64) - c.param.scaled(r as u64).floor();
    }
    acc
}

fn floor_quot<T: Scalar>(t: u32, x: &PerturbedRat<T>) -> T {
    int_over(t as u64, x)
        .expect("ellipsoid parameter must be positive")
        .floor()
}

/// The index-zero condition `3m = t + ceil(t/x)` for a degree-`m` curve with
/// a single negative end of multiplicity `t` on the short orbit.
///
/// Only meaningful for irrational-modelled `x` (nonzero tilt); a rational
/// parameter is rejected.
pub fn index_condition<T: Scalar>(m: u32, x: &PerturbedRat<T>, t: u32) -> Result<bool, Error> {
    if x.tilt() == Tilt::None {
        return Err(Error::RationalParam(format!(
            "the index condition needs an irrational-modelled parameter, got {x}"
        )));
    }
    if !x.base().is_positive() {
        return Err(Error::Domain(format!(
            "parameter must be positive, got {x}"
        )));
    }
    let ceil = int_over(t as u64, x)?.ceil();
    Ok(int::<T>(3 * m as u64) == int::<T>(t as u64) + ceil)
}

/// Half-index of a multiply covered orbit cylinder:
/// `s + floor(s/y)` over the short orbit, `r + floor(r*y)` over the long one.
///
/// The long-orbit form is reconstructed from its printed instances
/// (`1 + floor(x)`, `2 + floor(2y)`, `11 + 74`); no closed statement of it
/// is recorded elsewhere in this library's sources.
pub fn half_index_orbit_cyl<T: Scalar>(o: &OrbitSpec<T>) -> T {
    let mult = int::<T>(o.mult as u64);
    match o.orbit {
        Orbit::Short => mult + floor_quot(o.mult, &o.param),
        Orbit::Long => mult + o.param.scaled(o.mult as u64).floor(),
    }
}

/// The least ball size a positive-action curve of this shape allows:
/// `(sum_i t_i + x * sum_j r_j) / m`, exactly.
///
/// With no long ends the parameter's tilt never enters and the threshold is
/// an untilted rational.
pub fn action_obstruction<T: Scalar>(c: &CurveSpec<T>) -> Result<PerturbedRat<T>, Error> {
    if c.degree == 0 {
        return Err(Error::Domain(
            "action threshold needs a curve of positive degree".into(),
        ));
    }
    let t_sum: u64 = c.short_ends.iter().map(|&t| t as u64).sum();
    let r_sum: u64 = c.long_ends.iter().map(|&r| r as u64).sum();
    let t_rat = Ratio::from_integer(int::<T>(t_sum));
    let total = if r_sum == 0 {
        PerturbedRat::exact(t_rat)
    } else {
        c.param.scaled(r_sum).plus_rat(&t_rat)
    };
    Ok(total.div_by(c.degree as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Int, PRat};

    fn pr(s: &str) -> PRat {
        s.parse().unwrap()
    }

    fn big(n: i64) -> Int {
        Int::from(n)
    }

    fn curve(m: u32, x: &str, short: &[u32], long: &[u32]) -> CurveSpec<Int> {
        CurveSpec {
            degree: m,
            param: pr(x),
            short_ends: short.to_vec(),
            long_ends: long.to_vec(),
        }
    }

    #[test]
    fn curve_half_index_examples() {
        // degree 3 with one end of multiplicity 8 at x = 8 + eps: index zero
        assert_eq!(half_index_curve(&curve(3, "8+", &[8], &[])), big(0));
        // the closed degree-zero curve
        assert_eq!(half_index_curve(&curve(0, "2+", &[], &[])), big(-1));
        // one long end: -1 + 9 - (1 + 7) = 0
        assert_eq!(half_index_curve(&curve(3, "7+", &[], &[1])), big(0));
        // mixed ends
        assert_eq!(
            half_index_curve(&curve(3, "7+", &[2, 5], &[])),
            big(-1 + 9 - 2 - 5)
        );
    }

    #[test]
    fn index_condition_examples() {
        for m in 1..=10 {
            let x = PRat::from_int(3 * m as i64 - 1, crate::Tilt::Up);
            assert!(index_condition(m, &x, 3 * m - 1).unwrap(), "m = {m}");
        }
        assert!(index_condition(8, &pr("7+"), 21).unwrap());
        // 87 = 76 + 11
        assert!(index_condition(29, &pr("76/11+"), 76).unwrap());
        // ceil(t/x) = 1 whenever x > t, so the condition holds for every
        // upward-tilted x at or above 3m - 1, not just at the left endpoint
        for m in 1..=6u32 {
            let t = 3 * m - 1;
            for extra in [0i64, 1, 5, 40] {
                let x = PRat::from_int(t as i64 + extra, crate::Tilt::Up);
                assert!(index_condition(m, &x, t).unwrap(), "m = {m}, x = {x}");
            }
        }
        // failing case: 3*2 = 6 while 9 + 1 = 10
        assert!(!index_condition(2, &pr("5+"), 9).unwrap());
        // rational parameter is rejected
        assert!(matches!(
            index_condition(3, &pr("8"), 8),
            Err(Error::RationalParam(_))
        ));
    }

    #[test]
    fn orbit_cylinder_half_indices() {
        let orbit = |orbit, mult, param: &str| OrbitSpec::<Int> {
            orbit,
            mult,
            param: pr(param),
        };
        // 11 + floor(11 * (34/5 + eps)) = 11 + 74
        assert_eq!(
            half_index_orbit_cyl(&orbit(Orbit::Long, 11, "34/5+")),
            big(85)
        );
        // 75 + floor(75 / (34/5 + eps)) = 75 + 11
        assert_eq!(
            half_index_orbit_cyl(&orbit(Orbit::Short, 75, "34/5+")),
            big(86)
        );
        // floor(1/y) = 0 for any y > 1
        assert_eq!(
            half_index_orbit_cyl(&orbit(Orbit::Short, 1, "9/8+")),
            big(1)
        );
        assert_eq!(
            half_index_orbit_cyl(&orbit(Orbit::Long, 1, "13/2+")),
            big(7)
        );
        assert_eq!(
            half_index_orbit_cyl(&orbit(Orbit::Long, 11, "76/11+")),
            big(87)
        );
        assert_eq!(
            half_index_orbit_cyl(&orbit(Orbit::Short, 76, "76/11+")),
            big(86)
        );
    }

    #[test]
    fn orbit_half_index_is_increasing_in_mult() {
        for mult in 1..40 {
            let lo = half_index_orbit_cyl(&OrbitSpec::<Int> {
                orbit: Orbit::Short,
                mult,
                param: pr("13/2+"),
            });
            let hi = half_index_orbit_cyl(&OrbitSpec::<Int> {
                orbit: Orbit::Short,
                mult: mult + 1,
                param: pr("13/2+"),
            });
            assert!(lo < hi);
        }
    }

    #[test]
    fn action_thresholds() {
        let th = |c: &CurveSpec<Int>| action_obstruction(c).unwrap();
        // no long ends: the threshold is exactly rational
        assert_eq!(th(&curve(3, "8+", &[8], &[])), pr("8/3"));
        assert_eq!(th(&curve(1, "5+", &[1], &[])), pr("1"));
        assert_eq!(th(&curve(8, "7+", &[21], &[])), pr("21/8"));
        // long ends import the parameter's tilt
        assert_eq!(th(&curve(3, "7+", &[1], &[2])), pr("5+"));
        assert!(action_obstruction(&curve(0, "7+", &[1], &[])).is_err());
    }

    #[test]
    fn zero_index_iff_index_condition_for_single_short_end() {
        for m in 1..=6u32 {
            for t in 1..=(3 * m) {
                for x in ["5+", "8+", "13/2+", "76/11+", "7-"] {
                    let c = curve(m, x, &[t], &[]);
                    let zero = half_index_curve(&c) == big(0);
                    let cond = index_condition(m, &pr(x), t).unwrap();
                    assert_eq!(zero, cond, "m={m} t={t} x={x}");
                }
            }
        }
    }
}
