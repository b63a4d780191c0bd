//! Exact rationals with an infinitesimal tilt.
//!
//! A [`PerturbedRat`] is a rational base together with a tilt in
//! `{-1, 0, +1}`, standing for `base - eps`, `base`, or `base + eps` for an
//! unspecified positive infinitesimal `eps`. The tilt is a formal tag, not a
//! small float: floors, ceilings and comparisons of tilted values are decided
//! exactly, so a tilted value behaves like a nearby irrational number.
//!
//! Only the operations the index and grading formulas need are provided:
//! scaling by an integer, dividing an integer by a tilted value (which flips
//! the tilt), reciprocals, and shifts by exact rationals. Products of two
//! tilted values are deliberately absent — they would introduce second-order
//! infinitesimal ambiguity that nothing here requires.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::ToBigInt;
use num_integer::{Integer, Roots};
use num_rational::Ratio;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

/// Backing integer for all exact arithmetic. Implemented by `BigInt` and the
/// primitive signed integers; the blanket impl picks up anything with the
/// right `num` traits.
pub trait Scalar:
    Clone
    + Integer
    + Signed
    + Roots
    + FromPrimitive
    + ToPrimitive
    + ToBigInt
    + FromStr
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
{
}

impl<T> Scalar for T where
    T: Clone
        + Integer
        + Signed
        + Roots
        + FromPrimitive
        + ToPrimitive
        + ToBigInt
        + FromStr
        + fmt::Debug
        + fmt::Display
        + Send
        + Sync
        + 'static
{
}

/// Convert a small unsigned integer into the scalar type.
pub(crate) fn int<T: Scalar>(n: u64) -> T {
    T::from_u64(n).expect("scalar cannot represent u64")
}

/// Convert a small signed integer into the scalar type.
pub(crate) fn int_i<T: Scalar>(n: i64) -> T {
    T::from_i64(n).expect("scalar cannot represent i64")
}

/// An integer as an exact rational.
pub(crate) fn rat_int<T: Scalar>(n: u64) -> Ratio<T> {
    Ratio::from_integer(int(n))
}

/// Direction of the infinitesimal perturbation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tilt {
    /// `base - eps`.
    Down,
    /// Exactly `base`.
    None,
    /// `base + eps`.
    Up,
}

impl Tilt {
    /// The tilt of `-v` (and of `1/v`, `c - v`, ...): perturbation direction
    /// under any order-reversing map.
    pub fn flip(self) -> Self {
        match self {
            Tilt::Down => Tilt::Up,
            Tilt::None => Tilt::None,
            Tilt::Up => Tilt::Down,
        }
    }

    fn suffix(self) -> &'static str {
        match self {
            Tilt::Down => "-",
            Tilt::None => "",
            Tilt::Up => "+",
        }
    }
}

/// An exact rational with an infinitesimal tilt.
///
/// Two values compare equal iff base and tilt both agree; the ordering is
/// lexicographic in (base, tilt), which is exactly the order of the real
/// numbers `base + tilt * eps` for small `eps > 0`.
///
/// Textual form: `p/q`, `p/q+`, `p/q-` (the `/q` is omitted when `q = 1`),
/// always in lowest terms on output.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PerturbedRat<T: Scalar> {
    base: Ratio<T>,
    tilt: Tilt,
}

impl<T: Scalar> PerturbedRat<T> {
    pub fn new(base: Ratio<T>, tilt: Tilt) -> Self {
        PerturbedRat { base, tilt }
    }

    /// An untilted exact rational.
    pub fn exact(base: Ratio<T>) -> Self {
        PerturbedRat {
            base,
            tilt: Tilt::None,
        }
    }

    /// `n + tilt * eps` for a machine integer `n`.
    pub fn from_int(n: i64, tilt: Tilt) -> Self {
        PerturbedRat {
            base: Ratio::from_integer(int_i(n)),
            tilt,
        }
    }

    pub fn base(&self) -> &Ratio<T> {
        &self.base
    }

    pub fn tilt(&self) -> Tilt {
        self.tilt
    }

    /// Exact floor. A positive tilt only matters when the base is already an
    /// integer `k`: `floor(k + eps) = k` again, while `floor(k - eps) = k - 1`.
    pub fn floor(&self) -> T {
        let f = self.base.floor().to_integer();
        match self.tilt {
            Tilt::Down if self.base.is_integer() => f - T::one(),
            _ => f,
        }
    }

    /// Exact ceiling. For any nonzero tilt the value is irrational-like, so
    /// `ceil = floor + 1` always; for tilt zero this is the ordinary ceiling.
    pub fn ceil(&self) -> T {
        match self.tilt {
            Tilt::None => self.base.ceil().to_integer(),
            _ => self.floor() + T::one(),
        }
    }

    /// `1 / self`. The tilt flips: inversion is order-reversing away from 0.
    pub fn recip(&self) -> Result<Self, Error> {
        if self.base.is_zero() {
            return Err(Error::Domain(
                "cannot invert a perturbed rational with zero base".into(),
            ));
        }
        Ok(PerturbedRat {
            base: self.base.clone().recip(),
            tilt: self.tilt.flip(),
        })
    }

    /// `n * self` for `n >= 0`. Scaling by a positive integer preserves the
    /// tilt; scaling by zero gives exact zero.
    pub fn scaled(&self, n: u64) -> Self {
        if n == 0 {
            return PerturbedRat::exact(Ratio::zero());
        }
        PerturbedRat {
            base: self.base.clone() * rat_int::<T>(n),
            tilt: self.tilt,
        }
    }

    /// `self / n` for `n >= 1`; tilt preserved.
    pub fn div_by(&self, n: u64) -> Self {
        assert!(n > 0, "division by zero");
        PerturbedRat {
            base: self.base.clone() / rat_int::<T>(n),
            tilt: self.tilt,
        }
    }

    /// `self + r` for an exact rational `r`; tilt preserved.
    pub fn plus_rat(&self, r: &Ratio<T>) -> Self {
        PerturbedRat {
            base: self.base.clone() + r,
            tilt: self.tilt,
        }
    }

    /// `r - self` for an exact rational `r`; tilt flips.
    pub fn sub_from(&self, r: &Ratio<T>) -> Self {
        PerturbedRat {
            base: r - self.base.clone(),
            tilt: self.tilt.flip(),
        }
    }

    /// Compare against an exact rational in the perturbed order.
    pub fn cmp_rat(&self, r: &Ratio<T>) -> Ordering {
        self.base.cmp(r).then(self.tilt.cmp(&Tilt::None))
    }

    /// Compare against a machine integer in the perturbed order.
    pub fn cmp_int(&self, n: i64) -> Ordering {
        self.cmp_rat(&Ratio::from_integer(int_i(n)))
    }

    /// A floating-point approximation of the base (the tilt is below any
    /// float resolution). For display only.
    pub fn approx(&self) -> f64 {
        self.base.to_f64().unwrap_or(f64::NAN)
    }
}

/// `t / x` as an exact perturbed rational, for a nonnegative integer `t` and
/// `x` with positive base. The tilt flips: dividing a positive constant by
/// something slightly larger gives something slightly smaller.
pub fn int_over<T: Scalar>(t: u64, x: &PerturbedRat<T>) -> Result<PerturbedRat<T>, Error> {
    if !x.base.is_positive() {
        return Err(Error::Domain(format!(
            "divisor must have positive base, got {x}"
        )));
    }
    Ok(x.recip()?.scaled(t))
}

impl<T: Scalar> fmt::Display for PerturbedRat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", format_ratio(&self.base), self.tilt.suffix())
    }
}

/// Floating-point approximation of an exact rational, for display only.
pub fn ratio_approx<T: Scalar>(r: &Ratio<T>) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Canonical rational text: `p` when the denominator is 1, else `p/q`.
pub fn format_ratio<T: Scalar>(r: &Ratio<T>) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `p` or `p/q` into an exact rational in lowest terms.
pub fn parse_ratio<T: Scalar>(s: &str) -> Result<Ratio<T>, Error> {
    let s = s.trim();
    let (ns, ds) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let numer = T::from_str(ns).map_err(|_| Error::Parse(format!("invalid integer `{ns}`")))?;
    let denom = match ds {
        Some(d) => T::from_str(d).map_err(|_| Error::Parse(format!("invalid integer `{d}`")))?,
        None => T::one(),
    };
    if denom.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{s}`")));
    }
    Ok(Ratio::new(numer, denom))
}

impl<T: Scalar> FromStr for PerturbedRat<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let (body, tilt) = match s.as_bytes().last() {
            Some(b'+') => (&s[..s.len() - 1], Tilt::Up),
            Some(b'-') => (&s[..s.len() - 1], Tilt::Down),
            _ => (s, Tilt::None),
        };
        if body.is_empty() {
            return Err(Error::Parse(format!("empty number in `{s}`")));
        }
        Ok(PerturbedRat::new(parse_ratio(body)?, tilt))
    }
}

impl<T: Scalar> Serialize for PerturbedRat<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de, T: Scalar> Deserialize<'de> for PerturbedRat<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Fibonacci numbers with `fib(-1) = 1`, `fib(0) = 0`, `fib(1) = fib(2) = 1`.
///
/// The `-1` seed is what makes the first staircase step come out right:
/// its left endpoint is `fib(3)/fib(-1) = 2`.
pub fn fib<T: Scalar>(n: i32) -> Result<T, Error> {
    if n < -1 {
        return Err(Error::Domain(format!("fib index {n} (need n >= -1)")));
    }
    let mut prev = T::one(); // f(-1)
    let mut cur = T::zero(); // f(0)
    for _ in 0..n {
        let next = prev + cur.clone();
        prev = cur;
        cur = next;
    }
    // after k iterations cur = f(k); n = -1 never enters the loop
    Ok(if n == -1 { T::one() } else { cur })
}

/// Exact comparison of a positive rational with `tau^4 = (7 + 3*sqrt(5))/2`,
/// the fourth power of the golden ratio (about 6.8541): the accumulation
/// point of the capacity staircase.
///
/// Decided by the sign of `(2r - 7)^2 - 45`; never `Equal` for rational
/// input since `tau^4` is irrational.
pub fn cmp_tau4<T: Scalar>(r: &Ratio<T>) -> Ordering {
    let d = Ratio::from_integer(int::<T>(2)) * r - rat_int::<T>(7);
    if d.is_negative() {
        return Ordering::Less;
    }
    (d.clone() * d).cmp(&rat_int::<T>(45))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{PRat, Rat};

    fn pr(s: &str) -> PRat {
        s.parse().unwrap()
    }

    fn rt(s: &str) -> Rat {
        parse_ratio(s).unwrap()
    }

    fn big(n: i64) -> crate::Int {
        crate::Int::from(n)
    }

    /// Substitute an explicit small rational for the tilt.
    fn eps_substitute(v: &PRat, eps: &Rat) -> Rat {
        match v.tilt() {
            Tilt::Down => v.base() - eps,
            Tilt::None => v.base().clone(),
            Tilt::Up => v.base() + eps,
        }
    }

    #[test]
    fn floor_of_tilted_values() {
        // 7/(7+eps) = 1 - eps' has floor 0
        let x = pr("7+");
        assert_eq!(int_over(7, &x).unwrap().floor(), big(0));
        // plain integer
        assert_eq!(pr("5").floor(), big(5));
        // 374/5 + eps
        assert_eq!(pr("374/5+").floor(), big(74));
        // tilt only matters at integers
        assert_eq!(pr("5-").floor(), big(4));
        assert_eq!(pr("5+").floor(), big(5));
        assert_eq!(pr("11/2-").floor(), big(5));
        assert_eq!(pr("11/2+").floor(), big(5));
    }

    #[test]
    fn ceil_of_tilted_values() {
        // 76/(76/11+eps) = 11 - eps' has ceiling 11
        let x = pr("76/11+");
        assert_eq!(int_over(76, &x).unwrap().ceil(), big(11));
        assert_eq!(pr("3").ceil(), big(3));
        // 21/(7+eps) is just less than 3
        let y = pr("7+");
        assert_eq!(int_over(21, &y).unwrap().ceil(), big(3));
    }

    #[test]
    fn ceil_is_floor_plus_one_when_tilted() {
        for s in ["5+", "5-", "374/5+", "13/2-", "-7/3+", "0+", "0-"] {
            let v = pr(s);
            assert_eq!(v.ceil(), v.floor() + big(1), "at {s}");
        }
    }

    #[test]
    fn int_over_flips_tilt() {
        // 8/(8+eps) = 1 - eps
        let v = int_over(8, &pr("8+")).unwrap();
        assert_eq!(v, pr("1-"));
        // exact division keeps tilt zero
        assert_eq!(int_over(5, &pr("5/2")).unwrap(), pr("2"));
        // 75/(34/5 + eps) = 375/34 - eps
        assert_eq!(int_over(75, &pr("34/5+")).unwrap(), pr("375/34-"));
        // rejected on nonpositive base
        assert!(int_over(3, &pr("0+")).is_err());
        assert!(int_over(3, &pr("-2+")).is_err());
    }

    #[test]
    fn scaled_preserves_tilt() {
        // 11 * (76/11 + eps) = 76 + eps, floor 76
        let v = pr("76/11+").scaled(11);
        assert_eq!(v, pr("76+"));
        assert_eq!(v.floor(), big(76));
        assert_eq!(pr("13/2+").scaled(1), pr("13/2+"));
        assert_eq!(pr("13/2+").scaled(2), pr("13+"));
        assert_eq!(pr("13/2+").scaled(2).floor(), big(13));
        // zero kills the tilt
        assert_eq!(pr("13/2+").scaled(0), pr("0"));
    }

    #[test]
    fn floor_ceil_match_eps_substitution() {
        // deterministic sweep of bases n/d and both tilts, against an exact
        // rational eps smaller than any gap to an integer
        let eps = rt("1/1000000000");
        for n in -40i64..=40 {
            for d in 1i64..=9 {
                for tilt in [Tilt::Down, Tilt::None, Tilt::Up] {
                    let v = PRat::new(Rat::new(big(n), big(d)), tilt);
                    let sub = eps_substitute(&v, &eps);
                    assert_eq!(v.floor(), sub.floor().to_integer(), "floor {v}");
                    assert_eq!(v.ceil(), sub.ceil().to_integer(), "ceil {v}");
                }
            }
        }
    }

    #[test]
    fn ordering_is_lexicographic() {
        assert!(pr("5-") < pr("5"));
        assert!(pr("5") < pr("5+"));
        assert!(pr("5+") < pr("21/4"));
        assert!(pr("5+") < pr("6-"));
        assert_eq!(pr("10/2"), pr("5"));
    }

    #[test]
    fn fib_values_and_identity() {
        assert_eq!(fib::<i64>(-1).unwrap(), 1);
        assert_eq!(fib::<i64>(0).unwrap(), 0);
        assert_eq!(fib::<i64>(1).unwrap(), 1);
        assert_eq!(fib::<i64>(2).unwrap(), 1);
        assert_eq!(fib::<i64>(3).unwrap(), 2);
        assert_eq!(fib::<i64>(5).unwrap(), 5);
        assert_eq!(fib::<i64>(7).unwrap(), 13);
        assert!(fib::<i64>(-2).is_err());
        // 3 f(k+3) = f(k+1) + f(k+5)
        for k in 1..=20 {
            let lhs = fib::<i64>(k + 3).unwrap() * 3;
            let rhs = fib::<i64>(k + 1).unwrap() + fib::<i64>(k + 5).unwrap();
            assert_eq!(lhs, rhs, "k = {k}");
        }
    }

    #[test]
    fn tau4_comparisons() {
        assert_eq!(cmp_tau4(&rt("34/5")), Ordering::Less);
        assert_eq!(cmp_tau4(&rt("7")), Ordering::Greater);
        // (2*48/7 - 7)^2 = (47/7)^2 = 2209/49 > 45
        assert_eq!(cmp_tau4(&rt("48/7")), Ordering::Greater);
        assert_eq!(cmp_tau4(&rt("1")), Ordering::Less);
        // tight Fibonacci quotients: odd-index ones approach tau^4 from
        // below, even-index ones from above
        assert_eq!(cmp_tau4(&rt("4181/610")), Ordering::Less);
        assert_eq!(cmp_tau4(&rt("2584/377")), Ordering::Greater);
        assert_eq!(cmp_tau4(&rt("377/55")), Ordering::Greater);
    }

    #[test]
    fn parse_display_round_trip() {
        for s in ["5", "5+", "5-", "13/2+", "-7/3-", "0", "76/11+"] {
            let v = pr(s);
            assert_eq!(v.to_string(), s);
            assert_eq!(pr(&v.to_string()), v);
        }
        // canonicalization
        assert_eq!(pr("10/4+").to_string(), "5/2+");
        assert_eq!(pr("8/1+").to_string(), "8+");
        assert_eq!(pr("-4/-6").to_string(), "2/3");
        assert!("".parse::<PRat>().is_err());
        assert!("+".parse::<PRat>().is_err());
        assert!("3/0".parse::<PRat>().is_err());
        assert!("a/2".parse::<PRat>().is_err());
    }

    #[test]
    fn sub_from_and_plus_rat() {
        // 21 - (7+eps) = 14 - eps
        let v = pr("7+").sub_from(&rt("21"));
        assert_eq!(v, pr("14-"));
        assert_eq!(v.floor(), big(13));
        assert_eq!(pr("7+").plus_rat(&rt("3/2")), pr("17/2+"));
        assert_eq!(pr("7+").div_by(2), pr("7/2+"));
    }
}
