//! The stabilization criterion: the index condition plus an exhaustive
//! decomposition search, yielding conditional lower bounds `c_k(x) >= t/m`.
//!
//! A triple `(m, x, t)` with `3m = t + ceil(t/x)` produces the bound
//! `c_k(x) >= t/m` provided the corresponding moduli space is nonempty and
//! `(m, t)` does not split as a sum of two or more smaller pairs each
//! satisfying the same index condition. The search for such splittings is
//! exhaustive: the candidate pairs are
//!
//! ```text
//! { (m', t') : 1 <= t' <= t-1,  m' = (t' + ceil(t'/x)) / 3 an integer,
//!   1 <= m' <= m-1 }
//! ```
//!
//! combined with unbounded multiplicity by a two-dimensional subset-sum.
//! Nonemptiness of the moduli space is *not* decided here; certificates for
//! it live in [`crate::building`], and every verdict carries the caveat.

use std::fmt;

use num_rational::Ratio;

use crate::exact::{int, int_over, PerturbedRat, Scalar, Tilt};
use crate::Error;

/// Fixed caveat attached to every stabilization bound.
pub const STAB_CAVEAT: &str = "conditional on the moduli space M(m, x, t) being nonempty";

/// Hard cap on the subset-sum table, in cells.
const TABLE_CELL_CAP: u64 = 200_000_000;

/// A witness splitting `(m, t) = sum of (m_i, t_i)` with every pair
/// satisfying the index condition; pairs are kept in ascending `t_i` order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub pairs: Vec<(u32, u32)>, // (m_i, t_i)
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (m, t)) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({m},{t})")?;
        }
        Ok(())
    }
}

/// Outcome of the stabilization test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabVerdict<T: Scalar> {
    pub index_ok: bool,
    pub decomposition: Option<Decomposition>,
    /// `t/m`, present iff the index condition holds and no decomposition
    /// exists. Conditional: see [`StabVerdict::caveat`].
    pub lower_bound: Option<Ratio<T>>,
    pub caveat: &'static str,
}

/// All candidate pairs `(m', t')` for splittings of `(m, t)` at parameter
/// `x`, in ascending `t'` order. Each `t'` determines its `m'`.
fn candidate_pairs<T: Scalar>(
    m: u32,
    x: &PerturbedRat<T>,
    t: u32,
) -> Result<Vec<(u32, u32)>, Error> {
    let mut out = Vec::new();
    for tp in 1..t {
        let ceil = int_over(tp as u64, x)?.ceil();
        let ceil = ceil.to_u64().expect("ceil(t'/x) is between 0 and t'");
        let s = tp as u64 + ceil;
        if s.is_multiple_of(3) {
            let mp = s / 3;
            if mp >= 1 && mp <= (m as u64).saturating_sub(1) {
                out.push((mp as u32, tp));
            }
        }
    }
    Ok(out)
}

/// Exhaustive search for a splitting of `(m, t)` into two or more candidate
/// pairs. Returns the witness whose sorted `t_i` sequence is
/// lexicographically smallest, for determinism; `None` if no splitting
/// exists.
///
/// The parameter must be irrational-modelled (nonzero tilt): the index
/// condition itself is only stated for irrational `x`.
pub fn find_decomposition<T: Scalar>(
    m: u32,
    x: &PerturbedRat<T>,
    t: u32,
) -> Result<Option<Decomposition>, Error> {
    if x.tilt() == Tilt::None {
        return Err(Error::RationalParam(format!(
            "decomposition search needs an irrational-modelled parameter, got {x}"
        )));
    }
    if m == 0 || t == 0 {
        return Err(Error::Domain("m and t must be positive".into()));
    }
    let cands = candidate_pairs(m, x, t)?;
    if cands.is_empty() {
        return Ok(None);
    }
    let k = cands.len();
    let cells = (k as u64 + 1) * (t as u64 + 1) * (m as u64 + 1);
    if cells > TABLE_CELL_CAP {
        return Err(Error::Domain(format!(
            "decomposition search table would need {cells} cells; \
             inputs this large are not supported"
        )));
    }

    // reach[kk][j][i]: (t_used = j, m_used = i) is a sum of one or more
    // pairs drawn (with repetition) from cands[kk..]
    let width = (t as usize + 1) * (m as usize + 1);
    let idx = |j: u32, i: u32| j as usize * (m as usize + 1) + i as usize;
    let mut reach = vec![vec![false; width]; k + 1];
    for kk in (0..k).rev() {
        let (mp, tp) = cands[kk];
        let (tail, head) = {
            let (a, b) = reach.split_at_mut(kk + 1);
            (&mut a[kk], &b[0])
        };
        for j in 0..=t {
            for i in 0..=m {
                let mut ok = head[idx(j, i)];
                if !ok && j >= tp && i >= mp {
                    ok = (j == tp && i == mp) || tail[idx(j - tp, i - mp)];
                }
                tail[idx(j, i)] = ok;
            }
        }
    }

    // greedy reconstruction of the lexicographically smallest sorted witness
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    let (mut rem_t, mut rem_m) = (t, m);
    let mut from = 0usize;
    loop {
        let mut advanced = false;
        let mut kk = from;
        while kk < k {
            let (mp, tp) = cands[kk];
            let fits = tp <= rem_t && mp <= rem_m;
            let finishes = fits && tp == rem_t && mp == rem_m;
            // the first pair must leave a nonempty remainder: one-pair
            // "splittings" are the triple itself, not a decomposition
            let usable = fits
                && !(finishes && pairs.is_empty())
                && (finishes || reach[kk][idx(rem_t - tp, rem_m - mp)]);
            if usable {
                pairs.push((mp, tp));
                rem_t -= tp;
                rem_m -= mp;
                from = kk;
                advanced = true;
                break;
            }
            kk += 1;
        }
        if !advanced {
            return Ok(None);
        }
        if rem_t == 0 && rem_m == 0 {
            break;
        }
    }

    debug_assert!(pairs.len() >= 2);
    debug_assert!(pairs
        .iter()
        .all(|&(mp, tp)| crate::index::index_condition(mp, x, tp) == Ok(true)));
    Ok(Some(Decomposition { pairs }))
}

/// The stabilization test: index condition, decomposition search, and the
/// conditional bound `t/m` when the criterion is met.
pub fn stab_check<T: Scalar>(m: u32, x: &PerturbedRat<T>, t: u32) -> Result<StabVerdict<T>, Error> {
    let index_ok = crate::index::index_condition(m, x, t)?;
    let decomposition = find_decomposition(m, x, t)?;
    let lower_bound = (index_ok && decomposition.is_none())
        .then(|| Ratio::new(int::<T>(t as u64), int::<T>(m as u64)));
    Ok(StabVerdict {
        index_ok,
        decomposition,
        lower_bound,
        caveat: STAB_CAVEAT,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Int, PRat};

    fn pr(s: &str) -> PRat {
        s.parse().unwrap()
    }

    /// Independent oracle: depth-first enumeration of all multisets of
    /// candidate pairs in ascending order, returning the first (hence
    /// lexicographically smallest) complete splitting with >= 2 parts.
    fn oracle(m: u32, x: &PRat, t: u32) -> Option<Vec<(u32, u32)>> {
        let mut cands = Vec::new();
        for tp in 1..t {
            let c = crate::exact::int_over(tp as u64, x).unwrap().ceil();
            let s = Int::from(tp) + c;
            if (s.clone() % Int::from(3)) == Int::from(0) {
                let mp = s / Int::from(3);
                if mp >= Int::from(1) && mp <= Int::from(m as i64 - 1) {
                    use num_traits::ToPrimitive;
                    cands.push((mp.to_u32().unwrap(), tp));
                }
            }
        }
        fn dfs(
            cands: &[(u32, u32)],
            from: usize,
            rem_m: u32,
            rem_t: u32,
            path: &mut Vec<(u32, u32)>,
        ) -> Option<Vec<(u32, u32)>> {
            if rem_m == 0 && rem_t == 0 {
                return (path.len() >= 2).then(|| path.clone());
            }
            for k in from..cands.len() {
                let (mp, tp) = cands[k];
                if mp <= rem_m && tp <= rem_t {
                    path.push((mp, tp));
                    if let Some(hit) = dfs(cands, k, rem_m - mp, rem_t - tp, path) {
                        return Some(hit);
                    }
                    path.pop();
                }
            }
            None
        }
        dfs(&cands, 0, m, t, &mut Vec::new())
    }

    #[test]
    fn equal_pair_splitting() {
        let d = find_decomposition(4, &pr("5+"), 10).unwrap().unwrap();
        assert_eq!(d.pairs, vec![(2, 5), (2, 5)]);
        assert_eq!(d.to_string(), "(2,5) + (2,5)");
    }

    #[test]
    fn integer_family_has_no_splittings() {
        for m in 1..=12u32 {
            let x = PRat::from_int(3 * m as i64 - 1, Tilt::Up);
            assert_eq!(find_decomposition(m, &x, 3 * m - 1).unwrap(), None, "m={m}");
        }
    }

    #[test]
    fn coprime_triple_has_no_splitting() {
        assert_eq!(find_decomposition(8, &pr("7+"), 21).unwrap(), None);
    }

    #[test]
    fn shared_factor_forces_splitting() {
        // gcd(p, q) = 2: equal-pair splitting with n = 2
        assert!(find_decomposition(4, &pr("5+"), 10).unwrap().is_some());
        // gcd(18, 9) = 9: n = 3 equal pairs (3, 6)
        let d = find_decomposition(9, &pr("2+"), 18).unwrap().unwrap();
        assert_eq!(d.pairs.iter().map(|p| p.0).sum::<u32>(), 9);
        assert_eq!(d.pairs.iter().map(|p| p.1).sum::<u32>(), 18);
    }

    #[test]
    fn verdicts() {
        let v = stab_check(29, &pr("76/11+"), 76).unwrap();
        assert!(v.index_ok);
        assert_eq!(v.decomposition, None);
        assert_eq!(
            v.lower_bound,
            Some(crate::exact::parse_ratio("76/29").unwrap())
        );
        assert_eq!(v.caveat, STAB_CAVEAT);

        let v = stab_check(3, &pr("8+"), 8).unwrap();
        assert_eq!(
            v.lower_bound,
            Some(crate::exact::parse_ratio("8/3").unwrap())
        );

        // 3*2 = 6 but 9 + 1 = 10
        let v = stab_check(2, &pr("5+"), 9).unwrap();
        assert!(!v.index_ok);
        assert_eq!(v.lower_bound, None);

        assert!(matches!(
            stab_check(3, &pr("8"), 8),
            Err(Error::RationalParam(_))
        ));
    }

    #[test]
    fn search_agrees_with_oracle_on_a_grid() {
        let params = ["5+", "7+", "8-", "13/2+", "9/2+", "76/11+"];
        for x in params {
            let x = pr(x);
            for m in 1..=6u32 {
                for t in 1..=18u32 {
                    let got = find_decomposition(m, &x, t).unwrap();
                    let want = oracle(m, &x, t);
                    assert_eq!(got.map(|d| d.pairs), want, "m={m} t={t} x={x}");
                }
            }
        }
    }

    use crate::Tilt;
}
