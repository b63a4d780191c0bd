//! Certificates for the inductive gluing construction, their verifier, and
//! the constructor for the degree-`m` family.
//!
//! A [`BuildingCertificate`] records a stacked configuration of curve
//! components, top level first, together with the claimed conclusion: an
//! element of the moduli space `M(m, x, t)` (degree `m`, one negative end of
//! multiplicity `t` on the short orbit of `E(1, x)`), with a claimed count
//! of glued curves. The verifier is a checker, not a prover: every component
//! carries the name of the rule that makes its gluing admissible, and the
//! verifier replays the combinatorial hypotheses of that rule. Analytic
//! inputs (the base-case curves, the step-one cylinder existence result, the
//! obstruction-bundle gluing theorem itself) are trusted as cited; their
//! hypotheses are what gets checked.
//!
//! Checks, in report order:
//!
//! - (a) end matching between consecutive levels, by exact multisets, except
//!   that a trivial cover absorbs any partition of its total multiplicity
//!   (that mismatch is precisely what obstruction-bundle gluing mediates,
//!   and rule (d) decides whether it is allowed);
//! - (b) every component has half-index zero;
//! - (c) every neck curve has strictly decreasing distinct positive-end
//!   multiplicities summing to its negative end, and satisfies the neck
//!   condition;
//! - (d) gluing several curves onto a trivial cover demands the single-part
//!   negative ECH partition at the cover;
//! - (e) every cobordism cylinder has coprime end multiplicities, and is
//!   either covered by the step-one existence result or at least not ruled
//!   out by the ECH grading/partition test;
//! - (f) the conclusion: a single bottom end matching `(t, x)`, the index
//!   condition `3m = t + ceil(t/x)`, and total top-curve degree `m`;
//! - (g) the action threshold `t/m` (informational);
//! - (h) the claimed count against the product of the computed gluing
//!   coefficients (skipped with a note when a coefficient shape is not
//!   modelled).

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::ech::{
    cylinder_verdict, ech_partition_neg, gluing_coeff_two_parts, neck_condition, CylVerdict,
    Partition,
};
use crate::exact::{int, int_over, PerturbedRat, Scalar, Tilt};
use crate::index::{
    action_obstruction, half_index_curve, half_index_orbit_cyl, index_condition, CurveSpec, Orbit,
    OrbitSpec,
};
use crate::Error;

/// Admissibility rule names carried by components.
pub const RULE_BASE_CASE: &str = "ech-base-case";
pub const RULE_OBSTRUCTION_GLUING: &str = "ht-obstruction-gluing";
pub const RULE_TRIVIAL_COVER: &str = "trivial-cover-partition";
pub const RULE_REGULAR_CYLINDER: &str = "regular-cylinder-coprime";

/// Caveat attached to every report: what the verifier does *not* establish.
pub const COUNT_CAVEAT: &str = "claimed_count is a computed expectation from gluing \
coefficients; existence and uniqueness of the cited base-case curves and step-one \
cylinders are trusted, not re-derived";

/// An asymptotic end: an orbit, a covering multiplicity, and the ellipsoid
/// boundary it lives on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct End<T: Scalar> {
    pub orbit: Orbit,
    pub mult: u32,
    pub param: PerturbedRat<T>,
}

impl<T: Scalar> End<T> {
    pub fn short(mult: u32, param: &PerturbedRat<T>) -> Self {
        End {
            orbit: Orbit::Short,
            mult,
            param: param.clone(),
        }
    }
}

/// One curve component of a building.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub enum Component<T: Scalar> {
    /// A genus-zero curve in the completed complement at parameter `param`.
    TopCurve {
        degree: u32,
        param: PerturbedRat<T>,
        neg_ends: Vec<End<T>>,
        admissibility_rule: String,
    },
    /// A branched-cover trajectory in the symplectization of the boundary at
    /// `param`: several positive ends, one negative end.
    NeckCurve {
        param: PerturbedRat<T>,
        pos_ends: Vec<End<T>>,
        neg_ends: Vec<End<T>>,
        admissibility_rule: String,
    },
    /// An index-zero cylinder across the cobordism between two boundaries.
    CobordismCylinder {
        top: End<T>,
        bottom: End<T>,
        admissibility_rule: String,
    },
    /// An unbranched multiple cover of an orbit cylinder in a
    /// symplectization.
    TrivialCover {
        orbit: Orbit,
        mult: u32,
        param: PerturbedRat<T>,
        admissibility_rule: String,
    },
}

impl<T: Scalar> Component<T> {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Component::TopCurve { .. } => "top_curve",
            Component::NeckCurve { .. } => "neck_curve",
            Component::CobordismCylinder { .. } => "cobordism_cylinder",
            Component::TrivialCover { .. } => "trivial_cover",
        }
    }

    pub fn rule(&self) -> &str {
        match self {
            Component::TopCurve {
                admissibility_rule, ..
            }
            | Component::NeckCurve {
                admissibility_rule, ..
            }
            | Component::CobordismCylinder {
                admissibility_rule, ..
            }
            | Component::TrivialCover {
                admissibility_rule, ..
            } => admissibility_rule,
        }
    }

    fn pos_ends(&self) -> Vec<End<T>> {
        match self {
            Component::TopCurve { .. } => Vec::new(),
            Component::NeckCurve { pos_ends, .. } => pos_ends.clone(),
            Component::CobordismCylinder { top, .. } => vec![top.clone()],
            Component::TrivialCover {
                orbit, mult, param, ..
            } => vec![End {
                orbit: *orbit,
                mult: *mult,
                param: param.clone(),
            }],
        }
    }

    fn neg_ends(&self) -> Vec<End<T>> {
        match self {
            Component::TopCurve { neg_ends, .. } => neg_ends.clone(),
            Component::NeckCurve { neg_ends, .. } => neg_ends.clone(),
            Component::CobordismCylinder { bottom, .. } => vec![bottom.clone()],
            Component::TrivialCover {
                orbit, mult, param, ..
            } => vec![End {
                orbit: *orbit,
                mult: *mult,
                param: param.clone(),
            }],
        }
    }
}

/// The claimed conclusion of a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Conclusion<T: Scalar> {
    pub m: u32,
    pub param: PerturbedRat<T>,
    pub t: u32,
    #[serde(
        serialize_with = "serialize_count",
        deserialize_with = "deserialize_count"
    )]
    pub claimed_count: T,
}

fn serialize_count<T: Scalar, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn deserialize_count<'de, T: Scalar, D: serde::Deserializer<'de>>(d: D) -> Result<T, D::Error> {
    let s = String::deserialize(d)?;
    T::from_str(s.trim()).map_err(|_| serde::de::Error::custom(format!("invalid integer `{s}`")))
}

/// A leveled configuration of components, top level first, with a claimed
/// conclusion. Serializes to a stable JSON form; `parse . print` is the
/// identity byte for byte.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct BuildingCertificate<T: Scalar> {
    pub levels: Vec<Vec<Component<T>>>,
    pub conclusion: Conclusion<T>,
}

pub fn certificate_to_json<T: Scalar>(cert: &BuildingCertificate<T>) -> String {
    let mut s = serde_json::to_string_pretty(cert).expect("certificate serialization");
    s.push('\n');
    s
}

pub fn certificate_from_json<T: Scalar>(s: &str) -> Result<BuildingCertificate<T>, Error> {
    serde_json::from_str(s).map_err(|e| Error::Parse(format!("certificate: {e}")))
}

/// Half-index of a single component.
///
/// Top curves use the completed-complement formula. A neck trajectory with
/// positive ends `p_i` and negative ends `s_j` over parameter `y` has
/// `-1 + sum_i (cyl(p_i) + 1) - sum_j cyl(s_j)`, which for a single negative
/// end reduces to `sum_i ceil(p_i/y) - ceil(s/y)`. A cobordism cylinder is
/// the difference of its end indices; a trivial cover has index zero.
pub fn component_half_index<T: Scalar>(c: &Component<T>) -> T {
    match c {
        Component::TopCurve {
            degree,
            param,
            neg_ends,
            ..
        } => {
            let mut short = Vec::new();
            let mut long = Vec::new();
            for e in neg_ends {
                match e.orbit {
                    Orbit::Short => short.push(e.mult),
                    Orbit::Long => long.push(e.mult),
                }
            }
            half_index_curve(&CurveSpec {
                degree: *degree,
                param: param.clone(),
                short_ends: short,
                long_ends: long,
            })
        }
        Component::NeckCurve {
            pos_ends, neg_ends, ..
        } => {
            let mut acc = T::zero() - T::one();
            for e in pos_ends {
                acc = acc + cyl_half(e) + T::one();
            }
            for e in neg_ends {
                acc = acc - cyl_half(e);
            }
            acc
        }
        Component::CobordismCylinder { top, bottom, .. } => cyl_half(top) - cyl_half(bottom),
        Component::TrivialCover { .. } => T::zero(),
    }
}

fn cyl_half<T: Scalar>(e: &End<T>) -> T {
    half_index_orbit_cyl(&OrbitSpec {
        orbit: e.orbit,
        mult: e.mult,
        param: e.param.clone(),
    })
}

/// Identity of a verifier check in the report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    EndMatching,
    ComponentIndex,
    NeckAdmissibility,
    TrivialCoverAdmissibility,
    CylinderAdmissibility,
    Conclusion,
    ActionThreshold,
    CountConsistency,
}

impl CheckKind {
    pub fn label(&self) -> &'static str {
        match self {
            CheckKind::EndMatching => "(a) end-matching",
            CheckKind::ComponentIndex => "(b) component-index",
            CheckKind::NeckAdmissibility => "(c) neck-admissibility",
            CheckKind::TrivialCoverAdmissibility => "(d) trivial-cover-admissibility",
            CheckKind::CylinderAdmissibility => "(e) cylinder-admissibility",
            CheckKind::Conclusion => "(f) conclusion",
            CheckKind::ActionThreshold => "(g) action-threshold",
            CheckKind::CountConsistency => "(h) count-consistency",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Info,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub kind: CheckKind,
    pub site: String,
    pub status: CheckStatus,
    pub detail: String,
}

/// Verification outcome: one entry per check site, overall pass iff nothing
/// failed.
#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct Report<T: Scalar> {
    pub pass: bool,
    pub action_threshold: Option<PerturbedRat<T>>,
    pub caveat: String,
    pub checks: Vec<CheckResult>,
}

impl<T: Scalar> Report<T> {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }
}

impl<T: Scalar> fmt::Display for Report<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = match c.status {
                CheckStatus::Pass => "ok",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Info => "info",
            };
            write!(f, "{} [{}]: {}", c.kind.label(), c.site, status)?;
            if !c.detail.is_empty() {
                write!(f, " - {}", c.detail)?;
            }
            writeln!(f)?;
        }
        writeln!(f, "note: {}", self.caveat)?;
        write!(f, "overall: {}", if self.pass { "PASS" } else { "FAIL" })
    }
}

struct Checker<T: Scalar> {
    checks: Vec<CheckResult>,
    // (level of the cover, orbit, param) -> multiplicities glued onto it
    tc_attach: BTreeMap<(usize, Orbit, PerturbedRat<T>), Vec<u32>>,
}

impl<T: Scalar> Checker<T> {
    fn push(&mut self, kind: CheckKind, site: String, status: CheckStatus, detail: String) {
        self.checks.push(CheckResult {
            kind,
            site,
            status,
            detail,
        });
    }

    fn verdict(&mut self, kind: CheckKind, site: String, ok: bool, detail: String) {
        let status = if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        self.push(kind, site, status, detail);
    }
}

/// Verify a certificate. Structural violations (empty levels, bad
/// multiplicities, parameters not exceeding 1, unknown rule names, malformed
/// neck shapes, inverted cylinders, a base-case citation that does not
/// apply) are reported as [`Error::MalformedCertificate`]; everything else
/// becomes named pass/fail entries in the [`Report`].
pub fn verify_certificate<T: Scalar>(cert: &BuildingCertificate<T>) -> Result<Report<T>, Error> {
    structural_validate(cert)?;
    let mut ck = Checker {
        checks: Vec::new(),
        tc_attach: BTreeMap::new(),
    };
    check_end_matching(cert, &mut ck);
    check_component_indices(cert, &mut ck);
    check_necks(cert, &mut ck);
    check_trivial_covers(cert, &mut ck);
    check_cylinders(cert, &mut ck);
    check_conclusion(cert, &mut ck);
    let threshold = report_action_threshold(cert, &mut ck);
    check_count(cert, &mut ck);

    let pass = ck.checks.iter().all(|c| c.status != CheckStatus::Fail);
    Ok(Report {
        pass,
        action_threshold: threshold,
        caveat: COUNT_CAVEAT.into(),
        checks: ck.checks,
    })
}

fn malformed<T>(msg: String) -> Result<T, Error> {
    Err(Error::MalformedCertificate(msg))
}

fn structural_validate<T: Scalar>(cert: &BuildingCertificate<T>) -> Result<(), Error> {
    if cert.levels.is_empty() {
        return malformed("certificate has no levels".into());
    }
    let gt_one = |p: &PerturbedRat<T>| p.cmp_int(1) == std::cmp::Ordering::Greater;
    for (li, level) in cert.levels.iter().enumerate() {
        if level.is_empty() {
            return malformed(format!("level {li} is empty"));
        }
        let mut covers_here: Vec<(Orbit, PerturbedRat<T>)> = Vec::new();
        for (ci, comp) in level.iter().enumerate() {
            let site = format!("level {li}, component {ci}");
            for e in comp.pos_ends().iter().chain(comp.neg_ends().iter()) {
                if e.mult == 0 {
                    return malformed(format!("{site}: zero end multiplicity"));
                }
                if !gt_one(&e.param) {
                    return malformed(format!("{site}: end parameter {} must exceed 1", e.param));
                }
            }
            match comp {
                Component::TopCurve {
                    param,
                    neg_ends,
                    admissibility_rule,
                    degree,
                } => {
                    if !gt_one(param) {
                        return malformed(format!("{site}: parameter {param} must exceed 1"));
                    }
                    if neg_ends.is_empty() {
                        return malformed(format!("{site}: top curve without negative ends"));
                    }
                    if neg_ends.iter().any(|e| &e.param != param) {
                        return malformed(format!(
                            "{site}: end parameters disagree with the curve parameter"
                        ));
                    }
                    if admissibility_rule != RULE_BASE_CASE {
                        return malformed(format!(
                            "{site}: unknown rule `{admissibility_rule}` for a top curve"
                        ));
                    }
                    validate_base_case_citation(*degree, neg_ends, &site)?;
                }
                Component::NeckCurve {
                    param,
                    pos_ends,
                    neg_ends,
                    admissibility_rule,
                } => {
                    if !gt_one(param) {
                        return malformed(format!("{site}: parameter {param} must exceed 1"));
                    }
                    if pos_ends.len() < 2 {
                        return malformed(format!(
                            "{site}: a neck trajectory needs at least two positive ends \
                             (a single-ended cover is a trivial cover)"
                        ));
                    }
                    if neg_ends.len() != 1 {
                        return malformed(format!(
                            "{site}: a neck trajectory needs exactly one negative end"
                        ));
                    }
                    for e in pos_ends.iter().chain(neg_ends.iter()) {
                        if e.orbit != Orbit::Short {
                            return malformed(format!(
                                "{site}: neck trajectories are modelled on the short orbit only"
                            ));
                        }
                        if &e.param != param {
                            return malformed(format!(
                                "{site}: end parameters disagree with the neck parameter"
                            ));
                        }
                    }
                    if admissibility_rule != RULE_OBSTRUCTION_GLUING {
                        return malformed(format!(
                            "{site}: unknown rule `{admissibility_rule}` for a neck trajectory"
                        ));
                    }
                }
                Component::CobordismCylinder {
                    top,
                    bottom,
                    admissibility_rule,
                } => {
                    if top.orbit != Orbit::Short || bottom.orbit != Orbit::Short {
                        return malformed(format!(
                            "{site}: cobordism cylinders are modelled on the short orbit only"
                        ));
                    }
                    if top.param >= bottom.param {
                        return malformed(format!(
                            "{site}: cylinder must descend, got top parameter {} >= bottom {}",
                            top.param, bottom.param
                        ));
                    }
                    if admissibility_rule != RULE_REGULAR_CYLINDER {
                        return malformed(format!(
                            "{site}: unknown rule `{admissibility_rule}` for a cylinder"
                        ));
                    }
                }
                Component::TrivialCover {
                    orbit,
                    param,
                    admissibility_rule,
                    ..
                } => {
                    if *orbit != Orbit::Short {
                        return malformed(format!(
                            "{site}: trivial covers are modelled on the short orbit only"
                        ));
                    }
                    if !gt_one(param) {
                        return malformed(format!("{site}: parameter {param} must exceed 1"));
                    }
                    if admissibility_rule != RULE_TRIVIAL_COVER {
                        return malformed(format!(
                            "{site}: unknown rule `{admissibility_rule}` for a trivial cover"
                        ));
                    }
                    let key = (*orbit, param.clone());
                    if covers_here.contains(&key) {
                        return malformed(format!(
                            "{site}: two trivial covers over the same orbit and parameter \
                             make the attachment ambiguous"
                        ));
                    }
                    covers_here.push(key);
                }
            }
        }
    }
    if cert.conclusion.m == 0 || cert.conclusion.t == 0 {
        return malformed("conclusion needs positive degree and multiplicity".into());
    }
    if !gt_one(&cert.conclusion.param) {
        return malformed(format!(
            "conclusion parameter {} must exceed 1",
            cert.conclusion.param
        ));
    }
    if cert.conclusion.claimed_count < T::one() {
        return malformed("claimed count must be positive".into());
    }
    Ok(())
}

/// A base-case citation covers exactly the curves with one short end and
/// `(degree, mult) = (f(2i+1), f(2i+3))` for some `i >= 0` — the family
/// known to exist (uniquely) from the ECH constructions.
fn validate_base_case_citation<T: Scalar>(
    degree: u32,
    neg_ends: &[End<T>],
    site: &str,
) -> Result<(), Error> {
    if neg_ends.len() == 1 && neg_ends[0].orbit == Orbit::Short {
        let t = neg_ends[0].mult;
        let (mut a, mut b) = (1u64, 2u64); // f(1), f(3)
        for _ in 0..64 {
            if a == degree as u64 && b == t as u64 {
                return Ok(());
            }
            if a > degree as u64 {
                break;
            }
            (a, b) = (b, 3 * b - a); // odd-index step: f(n+4) = 3 f(n+2) - f(n)
        }
    }
    malformed(format!(
        "{site}: base-case citation does not apply to degree {degree} with ends {:?}",
        neg_ends.iter().map(|e| e.mult).collect::<Vec<_>>()
    ))
}

fn orbit_name(o: Orbit) -> &'static str {
    match o {
        Orbit::Short => "short",
        Orbit::Long => "long",
    }
}

fn check_end_matching<T: Scalar>(cert: &BuildingCertificate<T>, ck: &mut Checker<T>) {
    for li in 0..cert.levels.len().saturating_sub(1) {
        let mut neg: BTreeMap<(Orbit, PerturbedRat<T>), Vec<u32>> = BTreeMap::new();
        for comp in &cert.levels[li] {
            for e in comp.neg_ends() {
                neg.entry((e.orbit, e.param.clone()))
                    .or_default()
                    .push(e.mult);
            }
        }
        let mut pos: BTreeMap<(Orbit, PerturbedRat<T>), Vec<u32>> = BTreeMap::new();
        let mut covers: BTreeMap<(Orbit, PerturbedRat<T>), u32> = BTreeMap::new();
        let mut mixed: Vec<(Orbit, PerturbedRat<T>)> = Vec::new();
        for comp in &cert.levels[li + 1] {
            if let Component::TrivialCover {
                orbit, mult, param, ..
            } = comp
            {
                let key = (*orbit, param.clone());
                if pos.contains_key(&key) {
                    mixed.push(key.clone());
                }
                covers.insert(key, *mult);
            } else {
                for e in comp.pos_ends() {
                    let key = (e.orbit, e.param.clone());
                    if covers.contains_key(&key) {
                        mixed.push(key.clone());
                    }
                    pos.entry(key).or_default().push(e.mult);
                }
            }
        }

        let mut keys: Vec<(Orbit, PerturbedRat<T>)> = neg.keys().cloned().collect();
        for k in pos.keys().chain(covers.keys()) {
            if !keys.contains(k) {
                keys.push(k.clone());
            }
        }
        keys.sort();

        for key in keys {
            let site = format!("levels {li}->{}, {}@{}", li + 1, orbit_name(key.0), key.1);
            if mixed.contains(&key) {
                ck.verdict(
                    CheckKind::EndMatching,
                    site,
                    false,
                    "a trivial cover and other positive ends share this orbit; \
                     the attachment is ambiguous"
                        .into(),
                );
                continue;
            }
            let mut negs = neg.get(&key).cloned().unwrap_or_default();
            negs.sort_unstable();
            if let Some(&cover_mult) = covers.get(&key) {
                let total: u64 = negs.iter().map(|&m| m as u64).sum();
                let ok = total == cover_mult as u64 && !negs.is_empty();
                ck.verdict(
                    CheckKind::EndMatching,
                    site,
                    ok,
                    format!("ends {negs:?} glue onto a trivial {cover_mult}-fold cover"),
                );
                if ok {
                    ck.tc_attach
                        .insert((li + 1, key.0, key.1.clone()), negs.clone());
                }
                continue;
            }
            let mut poss = pos.get(&key).cloned().unwrap_or_default();
            poss.sort_unstable();
            let ok = negs == poss;
            ck.verdict(
                CheckKind::EndMatching,
                site,
                ok,
                if ok {
                    format!("multiplicities {negs:?}")
                } else {
                    format!("negative ends {negs:?} vs positive ends {poss:?}")
                },
            );
        }
    }
}

fn check_component_indices<T: Scalar>(cert: &BuildingCertificate<T>, ck: &mut Checker<T>) {
    for (li, level) in cert.levels.iter().enumerate() {
        for (ci, comp) in level.iter().enumerate() {
            let idx = component_half_index(comp);
            let ok = idx.is_zero();
            ck.verdict(
                CheckKind::ComponentIndex,
                format!("level {li}, component {ci} ({})", comp.kind_name()),
                ok,
                format!("half-index {idx}"),
            );
        }
    }
}

fn check_necks<T: Scalar>(cert: &BuildingCertificate<T>, ck: &mut Checker<T>) {
    for (li, level) in cert.levels.iter().enumerate() {
        for (ci, comp) in level.iter().enumerate() {
            let Component::NeckCurve {
                param,
                pos_ends,
                neg_ends,
                ..
            } = comp
            else {
                continue;
            };
            let site = format!("level {li}, component {ci}");
            let mut parts: Vec<u32> = pos_ends.iter().map(|e| e.mult).collect();
            let mut problems = Vec::new();
            parts.sort_unstable_by(|a, b| b.cmp(a));
            if parts.windows(2).any(|w| w[0] == w[1]) {
                problems.push(format!(
                    "positive-end multiplicities {parts:?} are not distinct \
                     (the glued curves must be distinct)"
                ));
            }
            let total: u64 = parts.iter().map(|&p| p as u64).sum();
            let s = neg_ends[0].mult;
            if total != s as u64 {
                problems.push(format!(
                    "positive ends sum to {total} but the negative end has multiplicity {s}"
                ));
            } else {
                let partition = Partition::new(parts.clone());
                if !neck_condition(&partition, param) {
                    problems.push(format!(
                        "neck condition fails: sum of ceil(p_i/y) differs from ceil({s}/y) \
                         at y = {param}"
                    ));
                }
            }
            let ok = problems.is_empty();
            ck.verdict(
                CheckKind::NeckAdmissibility,
                site,
                ok,
                if ok {
                    format!("partition {parts:?} at y = {param}")
                } else {
                    problems.join("; ")
                },
            );
        }
    }
}

fn check_trivial_covers<T: Scalar>(cert: &BuildingCertificate<T>, ck: &mut Checker<T>) {
    for (li, level) in cert.levels.iter().enumerate() {
        for (ci, comp) in level.iter().enumerate() {
            let Component::TrivialCover {
                orbit, mult, param, ..
            } = comp
            else {
                continue;
            };
            let site = format!("level {li}, component {ci}");
            let attached = ck
                .tc_attach
                .get(&(li, *orbit, param.clone()))
                .cloned()
                .unwrap_or_default();
            if attached.len() <= 1 {
                ck.push(
                    CheckKind::TrivialCoverAdmissibility,
                    site,
                    CheckStatus::Pass,
                    if attached.is_empty() {
                        "nothing glues onto this cover".into()
                    } else {
                        "a single curve end passes through".into()
                    },
                );
                continue;
            }
            let theta = param.recip().expect("parameter exceeds 1");
            let pneg = ech_partition_neg(*mult, &theta);
            let ok = pneg.is_single();
            ck.verdict(
                CheckKind::TrivialCoverAdmissibility,
                site,
                ok,
                if ok {
                    format!("negative ECH partition is ({mult})")
                } else {
                    format!(
                        "gluing {attached:?} onto the cover needs negative ECH partition \
                         ({mult}), but it is {pneg}"
                    )
                },
            );
        }
    }
}

fn check_cylinders<T: Scalar>(cert: &BuildingCertificate<T>, ck: &mut Checker<T>) {
    for (li, level) in cert.levels.iter().enumerate() {
        for (ci, comp) in level.iter().enumerate() {
            let Component::CobordismCylinder { top, bottom, .. } = comp else {
                continue;
            };
            let site = format!("level {li}, component {ci}");
            let (s, t) = (top.mult, bottom.mult);
            let mut problems = Vec::new();
            let g = s.gcd(&t);
            if g != 1 {
                problems.push(format!(
                    "end multiplicities {s} and {t} share the factor {g}: \
                     the cylinder could not be somewhere injective"
                ));
            }
            if s > t {
                problems.push(format!(
                    "top multiplicity {s} exceeds bottom multiplicity {t}"
                ));
            } else {
                match cylinder_verdict(s, &top.param, t, &bottom.param, false) {
                    Ok(CylVerdict::NotRuledOut) => {}
                    Ok(verdict) => problems.push(verdict.to_string()),
                    Err(e) => problems.push(e.to_string()),
                }
            }
            let ok = problems.is_empty();
            let detail = if !ok {
                problems.join("; ")
            } else if step_one_cylinder_exists(s, &top.param, t, &bottom.param) {
                "regular somewhere-injective cylinder (multiplicity step one)".into()
            } else {
                "not ruled out by the ECH grading/partition test; existence \
                 not certified by the step-one result"
                    .into()
            };
            ck.verdict(CheckKind::CylinderAdmissibility, site, ok, detail);
        }
    }
}

/// Hypotheses of the cylinder existence result: multiplicity step one,
/// `y < t < x`, and the forced `floor((t-1)/y) = 1`.
fn step_one_cylinder_exists<T: Scalar>(
    s: u32,
    y: &PerturbedRat<T>,
    t: u32,
    x: &PerturbedRat<T>,
) -> bool {
    s + 1 == t
        && y.cmp_int(t as i64) == std::cmp::Ordering::Less
        && x.cmp_int(t as i64) == std::cmp::Ordering::Greater
        && int_over(s as u64, y).is_ok_and(|q| q.floor() == T::one())
}

fn check_conclusion<T: Scalar>(cert: &BuildingCertificate<T>, ck: &mut Checker<T>) {
    let mut problems = Vec::new();
    let c = &cert.conclusion;

    let bottom: Vec<End<T>> = cert
        .levels
        .last()
        .map(|level| level.iter().flat_map(|comp| comp.neg_ends()).collect())
        .unwrap_or_default();
    match bottom.as_slice() {
        [e] => {
            if e.orbit != Orbit::Short || e.mult != c.t || e.param != c.param {
                problems.push(format!(
                    "bottom end {}^{}@{} does not match the conclusion t = {} at {}",
                    orbit_name(e.orbit),
                    e.mult,
                    e.param,
                    c.t,
                    c.param
                ));
            }
        }
        ends => problems.push(format!(
            "the bottom level must have exactly one negative end, found {}",
            ends.len()
        )),
    }

    match index_condition(c.m, &c.param, c.t) {
        Ok(true) => {}
        Ok(false) => problems.push(format!(
            "index condition 3m = t + ceil(t/x) fails for (m, x, t) = ({}, {}, {})",
            c.m, c.param, c.t
        )),
        Err(e) => problems.push(e.to_string()),
    }

    let degree_sum: u64 = cert
        .levels
        .iter()
        .flatten()
        .map(|comp| match comp {
            Component::TopCurve { degree, .. } => *degree as u64,
            _ => 0,
        })
        .sum();
    if degree_sum != c.m as u64 {
        problems.push(format!(
            "top-curve degrees sum to {degree_sum}, conclusion claims degree {}",
            c.m
        ));
    }

    let ok = problems.is_empty();
    ck.verdict(
        CheckKind::Conclusion,
        format!("M({}, {}, {})", c.m, c.param, c.t),
        ok,
        if ok {
            format!("claimed count {}", c.claimed_count)
        } else {
            problems.join("; ")
        },
    );
}

fn report_action_threshold<T: Scalar>(
    cert: &BuildingCertificate<T>,
    ck: &mut Checker<T>,
) -> Option<PerturbedRat<T>> {
    let c = &cert.conclusion;
    let threshold = action_obstruction(&CurveSpec {
        degree: c.m,
        param: c.param.clone(),
        short_ends: vec![c.t],
        long_ends: vec![],
    })
    .ok()?;
    ck.push(
        CheckKind::ActionThreshold,
        format!("M({}, {}, {})", c.m, c.param, c.t),
        CheckStatus::Info,
        format!("any ball containing the ellipsoid has capacity >= {threshold}"),
    );
    Some(threshold)
}

fn check_count<T: Scalar>(cert: &BuildingCertificate<T>, ck: &mut Checker<T>) {
    let mut product = T::one();
    for level in &cert.levels {
        for comp in level {
            let Component::NeckCurve {
                param, pos_ends, ..
            } = comp
            else {
                continue;
            };
            if pos_ends.len() != 2 {
                ck.push(
                    CheckKind::CountConsistency,
                    "certificate".into(),
                    CheckStatus::Info,
                    format!(
                        "skipped: no gluing coefficient is modelled for {}-part necks",
                        pos_ends.len()
                    ),
                );
                return;
            }
            let mut parts = [pos_ends[0].mult, pos_ends[1].mult];
            parts.sort_unstable_by(|a, b| b.cmp(a));
            let theta = param.recip().expect("parameter exceeds 1");
            match gluing_coeff_two_parts(parts[0], parts[1], &theta) {
                Ok(factor) => product = product * factor,
                Err(e) => {
                    ck.push(
                        CheckKind::CountConsistency,
                        "certificate".into(),
                        CheckStatus::Info,
                        format!("skipped: {e}"),
                    );
                    return;
                }
            }
        }
    }
    let claimed = &cert.conclusion.claimed_count;
    let ok = claimed == &product;
    ck.verdict(
        CheckKind::CountConsistency,
        "certificate".into(),
        ok,
        if ok {
            format!("product of gluing coefficients is {product}")
        } else {
            format!("claimed {claimed}, computed {product}")
        },
    );
}

/// The ellipsoid parameter used at stage `m`: the left end `3m - 1 + eps` of
/// the admissible interval, for determinism.
pub fn stage_param<T: Scalar>(m: u32) -> PerturbedRat<T> {
    PerturbedRat::new(Ratio::from_integer(int(3 * m as u64 - 1)), Tilt::Up)
}

fn leaf_curve<T: Scalar>(degree: u32, param: &PerturbedRat<T>) -> Component<T> {
    Component::TopCurve {
        degree,
        param: param.clone(),
        neg_ends: vec![End::short(3 * degree - 1, param)],
        admissibility_rule: RULE_BASE_CASE.into(),
    }
}

/// Certificate for an element of `M(m, 3m-1+eps, 3m-1)`.
///
/// For `m <= 2` this is a base-case leaf. For larger `m` each stage glues
/// the previous curve and a degree-one curve through a two-part neck onto a
/// step-one cylinder descending to the next parameter, and the levels of the
/// previous stage are reused verbatim (the recursion always picks the same
/// stage parameters).
pub fn construct_theorem_curve<T: Scalar>(m: u32) -> BuildingCertificate<T> {
    assert!(m >= 1, "degree must be positive");
    let base = m.min(2);
    let mut levels = vec![vec![leaf_curve(base, &stage_param::<T>(base))]];
    for stage in (base + 1)..=m {
        let y = stage_param::<T>(stage - 1);
        let x = stage_param::<T>(stage);
        let p1 = 3 * stage - 4; // negative end of the previous stage
        let s = p1 + 2;
        let t = s + 1; // = 3*stage - 1
        levels
            .last_mut()
            .expect("levels are nonempty")
            .push(leaf_curve(1, &y));
        levels.push(vec![Component::NeckCurve {
            param: y.clone(),
            pos_ends: vec![End::short(p1, &y), End::short(2, &y)],
            neg_ends: vec![End::short(s, &y)],
            admissibility_rule: RULE_OBSTRUCTION_GLUING.into(),
        }]);
        levels.push(vec![Component::CobordismCylinder {
            top: End::short(s, &y),
            bottom: End::short(t, &x),
            admissibility_rule: RULE_REGULAR_CYLINDER.into(),
        }]);
    }
    BuildingCertificate {
        levels,
        conclusion: Conclusion {
            m,
            param: stage_param::<T>(m),
            t: 3 * m - 1,
            claimed_count: expected_count(m),
        },
    }
}

/// How many elements the staged gluing is expected to produce: the product
/// over stages of the two-part gluing coefficients, computed (not assumed)
/// from the delta weights.
pub fn expected_count<T: Scalar>(m: u32) -> T {
    let mut product = T::one();
    if m <= 2 {
        return product;
    }
    for j in 2..m {
        let theta = stage_param::<T>(j).recip().expect("parameter exceeds 1");
        let factor = gluing_coeff_two_parts(3 * j - 1, 2, &theta)
            .expect("the stage partition is a valid two-part shape");
        product = product * factor;
    }
    product
}

/// A second-homology class in a blowup of the projective plane: `d` times
/// the line class minus the recorded multiples of the exceptional classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupClass {
    pub d: i64,
    pub multipliers: Vec<i64>,
}

impl BlowupClass {
    pub fn new(d: i64, multipliers: Vec<i64>) -> Self {
        BlowupClass { d, multipliers }
    }
}

/// Intersection pairing `a.d * b.d - sum_i a_i * b_i`, padding the shorter
/// multiplier list with zeros.
pub fn intersection_pairing(a: &BlowupClass, b: &BlowupClass) -> i64 {
    let dots: i64 = a
        .multipliers
        .iter()
        .zip(b.multipliers.iter())
        .map(|(x, y)| x * y)
        .sum();
    a.d * b.d - dots
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

    /// The configuration that tries to glue a degree-1 and a degree-2 curve
    /// onto a trivial 7-fold cover at y in (5, 6).
    fn trivial_cover_counterexample() -> BuildingCertificate<Int> {
        let y = pr("11/2+");
        BuildingCertificate {
            levels: vec![
                vec![leaf_curve(1, &y), leaf_curve(2, &y)],
                vec![Component::TrivialCover {
                    orbit: Orbit::Short,
                    mult: 7,
                    param: y.clone(),
                    admissibility_rule: RULE_TRIVIAL_COVER.into(),
                }],
            ],
            conclusion: Conclusion {
                m: 3,
                param: y,
                t: 7,
                claimed_count: big(1),
            },
        }
    }

    /// The configuration whose cobordism cylinder from the 20-fold orbit at
    /// 13/2+eps to the 21-fold orbit at 7+eps is ruled out.
    fn impossible_cylinder_counterexample() -> BuildingCertificate<Int> {
        let y = pr("13/2+");
        let x = pr("7+");
        BuildingCertificate {
            levels: vec![
                vec![
                    leaf_curve(1, &y),
                    leaf_curve(2, &y),
                    Component::TopCurve {
                        degree: 5,
                        param: y.clone(),
                        neg_ends: vec![End::short(13, &y)],
                        admissibility_rule: RULE_BASE_CASE.into(),
                    },
                ],
                vec![Component::NeckCurve {
                    param: y.clone(),
                    pos_ends: vec![End::short(13, &y), End::short(5, &y), End::short(2, &y)],
                    neg_ends: vec![End::short(20, &y)],
                    admissibility_rule: RULE_OBSTRUCTION_GLUING.into(),
                }],
                vec![Component::CobordismCylinder {
                    top: End::short(20, &y),
                    bottom: End::short(21, &x),
                    admissibility_rule: RULE_REGULAR_CYLINDER.into(),
                }],
            ],
            conclusion: Conclusion {
                m: 8,
                param: x,
                t: 21,
                claimed_count: big(1),
            },
        }
    }

    fn failing_kinds(report: &Report<Int>) -> Vec<CheckKind> {
        report.failures().map(|c| c.kind).collect()
    }

    #[test]
    fn constructed_certificates_verify() {
        for m in 1..=12 {
            let cert = construct_theorem_curve::<Int>(m);
            let report = verify_certificate(&cert).unwrap();
            assert!(report.pass, "m = {m}:\n{report}");
            // outer threshold (3m-1)/m, untilted
            assert_eq!(
                report.action_threshold,
                Some(PRat::exact(crate::Rat::new(
                    big(3 * m as i64 - 1),
                    big(m as i64)
                )))
            );
            // index bookkeeping: components sum to zero
            let total: Int = cert.levels.iter().flatten().map(component_half_index).sum();
            assert_eq!(total, big(0));
        }
    }

    #[test]
    fn construction_shape_for_m3() {
        let cert = construct_theorem_curve::<Int>(3);
        assert_eq!(cert.levels.len(), 3);
        assert_eq!(cert.levels[0].len(), 2);
        assert_eq!(cert.conclusion.m, 3);
        assert_eq!(cert.conclusion.t, 8);
        assert_eq!(cert.conclusion.param, pr("8+"));
        assert_eq!(cert.conclusion.claimed_count, big(4));
    }

    #[test]
    fn expected_counts_are_powers_of_four() {
        assert_eq!(expected_count::<Int>(1), big(1));
        assert_eq!(expected_count::<Int>(2), big(1));
        assert_eq!(expected_count::<Int>(3), big(4));
        assert_eq!(expected_count::<Int>(6), big(256));
        for m in 3..=20u32 {
            assert_eq!(
                expected_count::<Int>(m),
                num_traits::pow::pow(big(4), m as usize - 2),
                "m = {m}"
            );
        }
    }

    #[test]
    fn trivial_cover_gluing_fails_check_d() {
        let report = verify_certificate(&trivial_cover_counterexample()).unwrap();
        assert!(!report.pass);
        assert_eq!(
            failing_kinds(&report),
            vec![CheckKind::TrivialCoverAdmissibility]
        );
        let failure = report.failures().next().unwrap();
        assert!(failure.detail.contains("(5,2)"), "{}", failure.detail);
    }

    #[test]
    fn impossible_cylinder_fails_check_e() {
        let report = verify_certificate(&impossible_cylinder_counterexample()).unwrap();
        assert!(!report.pass);
        assert_eq!(
            failing_kinds(&report),
            vec![CheckKind::CylinderAdmissibility]
        );
        let failure = report.failures().next().unwrap();
        assert!(failure.detail.contains("(7,7,7)"), "{}", failure.detail);
    }

    #[test]
    fn tampered_count_fails_check_h() {
        let mut cert = construct_theorem_curve::<Int>(4);
        cert.conclusion.claimed_count = big(17);
        let report = verify_certificate(&cert).unwrap();
        assert_eq!(failing_kinds(&report), vec![CheckKind::CountConsistency]);
    }

    #[test]
    fn tampered_multiplicity_fails_namedly() {
        let mut cert = construct_theorem_curve::<Int>(5);
        // bump the cylinder bottom multiplicity
        if let Component::CobordismCylinder { bottom, .. } = &mut cert.levels.last_mut().unwrap()[0]
        {
            bottom.mult += 1;
        } else {
            panic!("expected a cylinder at the bottom");
        }
        let report = verify_certificate(&cert).unwrap();
        assert!(!report.pass);
        assert!(report.failures().count() >= 1);
    }

    #[test]
    fn serialization_round_trips_byte_exactly() {
        for m in [1, 2, 3, 7] {
            let cert = construct_theorem_curve::<Int>(m);
            let text = certificate_to_json(&cert);
            let parsed = certificate_from_json::<Int>(&text).unwrap();
            assert_eq!(parsed, cert);
            assert_eq!(certificate_to_json(&parsed), text);
        }
    }

    #[test]
    fn component_half_indices() {
        let y = pr("11/2");
        let neck = Component::NeckCurve {
            param: y.clone(),
            pos_ends: vec![End::short(5, &y), End::short(2, &y)],
            neg_ends: vec![End::short(7, &y)],
            admissibility_rule: RULE_OBSTRUCTION_GLUING.into(),
        };
        assert_eq!(component_half_index(&neck), big(0));

        for m in 1..=8i64 {
            let top_param = PRat::from_int(3 * m - 1, crate::Tilt::Up);
            let bottom_param = PRat::from_int(3 * m + 2, crate::Tilt::Up);
            let cyl = Component::CobordismCylinder {
                top: End::short(3 * m as u32 + 1, &top_param),
                bottom: End::short(3 * m as u32 + 2, &bottom_param),
                admissibility_rule: RULE_REGULAR_CYLINDER.into(),
            };
            assert_eq!(component_half_index(&cyl), big(0), "m = {m}");
        }

        let cover = Component::TrivialCover {
            orbit: Orbit::Short,
            mult: 7,
            param: pr("11/2+"),
            admissibility_rule: RULE_TRIVIAL_COVER.into(),
        };
        assert_eq!(component_half_index(&cover), big(0));
    }

    #[test]
    fn intersection_pairings() {
        // (L - E12) . (5L - 2 E1..6 - E78) = 5 - 4 = 1
        let a = BlowupClass::new(1, vec![1, 1]);
        let b = BlowupClass::new(5, vec![2, 2, 2, 2, 2, 2, 1, 1]);
        assert_eq!(intersection_pairing(&a, &b), 1);
        // L . L = 1
        let line = BlowupClass::new(1, vec![]);
        assert_eq!(intersection_pairing(&line, &line), 1);
        // (2L - E1..5) . (L - E12) = 2 - 2 = 0
        let c = BlowupClass::new(2, vec![1, 1, 1, 1, 1]);
        assert_eq!(intersection_pairing(&c, &a), 0);
    }

    #[test]
    fn base_case_citation_is_checked() {
        let y = pr("8+");
        let bogus = BuildingCertificate::<Int> {
            levels: vec![vec![Component::TopCurve {
                degree: 3,
                param: y.clone(),
                neg_ends: vec![End::short(8, &y)],
                admissibility_rule: RULE_BASE_CASE.into(),
            }]],
            conclusion: Conclusion {
                m: 3,
                param: y,
                t: 8,
                claimed_count: big(1),
            },
        };
        assert!(matches!(
            verify_certificate(&bogus),
            Err(Error::MalformedCertificate(_))
        ));
    }
}
