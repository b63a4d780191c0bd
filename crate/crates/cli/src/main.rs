//! Command-line front end for the exact ellipsoid-obstruction library.
//!
//! Every value is parsed and printed exactly: rationals as `p/q`, perturbed
//! rationals as `p/q`, `p/q+`, `p/q-`. Human output may add decimal
//! approximations marked with `~`; machine output (`--json`) carries exact
//! strings only and is byte-deterministic.
//!
//! Exit codes: 0 on success or a passing verdict, 1 on impossibility
//! verdicts and failed verification, 2 on usage and domain errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ellcap::building::{self, BuildingCertificate};
use ellcap::capacity::{self, CapValue, KnownResult};
use ellcap::ech::{self, CylVerdict, EndSide, Partition};
use ellcap::exact::{format_ratio, parse_ratio, ratio_approx};
use ellcap::index::{self, Orbit};
use ellcap::stabilize;
use ellcap::{Error, Int, PRat, Rat};

#[derive(Parser)]
#[command(
    name = "ellcap",
    version,
    about = "Exact combinatorics of ellipsoid embedding obstructions",
    long_about = "Exact combinatorics of ellipsoid embedding obstructions: the capacity \
staircase, Fredholm half-indices, ECH gradings and partitions, gluing coefficients, \
stabilization bounds, and building certificates.\n\nPerturbed rationals are written \
p/q (exact), p/q+ (plus an infinitesimal), p/q- (minus an infinitesimal)."
)]
struct Cli {
    /// Emit machine-readable JSON with exact rational strings.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate c0(x), or emit the staircase: `c0 staircase --steps N`.
    C0(C0Args),
    /// What is known about the stabilized capacity c_k(x), k >= 1.
    Ck {
        /// Rational x >= 1.
        x: String,
    },
    /// Fredholm half-indices of curves and orbit cylinders.
    #[command(subcommand)]
    Index(IndexCmd),
    /// ECH gradings, partitions, and cylinder rule-outs.
    #[command(subcommand)]
    Ech(EchCmd),
    /// Obstruction-bundle gluing weights and coefficients.
    #[command(subcommand)]
    Glue(GlueCmd),
    /// The stabilization criterion.
    #[command(subcommand)]
    Stab(StabCmd),
    /// Building certificates: build, verify, count.
    #[command(subcommand)]
    Cert(CertCmd),
}

#[derive(Args)]
struct C0Args {
    /// A rational x >= 1, or the literal word `staircase`.
    x: String,
    /// Number of constant steps to emit (staircase mode).
    #[arg(long)]
    steps: Option<u32>,
    /// Write the staircase as CSV (columns lo,hi,kind,parameter) to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum IndexCmd {
    /// Half-index of a genus-zero curve in the completed complement.
    Curve {
        /// Degree of the curve.
        #[arg(long)]
        m: u32,
        /// Ellipsoid parameter (perturbed rational, > 1).
        #[arg(long)]
        x: String,
        /// Comma-separated negative-end multiplicities on the short orbit.
        #[arg(long)]
        short: Option<String>,
        /// Comma-separated negative-end multiplicities on the long orbit.
        #[arg(long)]
        long: Option<String>,
    },
    /// Half-index of a multiply covered orbit cylinder.
    Orbit {
        #[arg(long)]
        orbit: OrbitArg,
        #[arg(long)]
        mult: u32,
        /// Ellipsoid parameter (perturbed rational, > 1).
        #[arg(long)]
        param: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OrbitArg {
    Short,
    Long,
}

impl From<OrbitArg> for Orbit {
    fn from(o: OrbitArg) -> Orbit {
        match o {
            OrbitArg::Short => Orbit::Short,
            OrbitArg::Long => Orbit::Long,
        }
    }
}

#[derive(Subcommand)]
enum EchCmd {
    /// Half-grading of the mult-fold short orbit: lattice points in a
    /// triangle, counted exactly.
    Grading {
        #[arg(long)]
        mult: u32,
        /// Ellipsoid parameter (perturbed rational, > 1).
        #[arg(long)]
        param: String,
    },
    /// ECH partition of total multiplicity k at monodromy angle theta.
    Partition {
        #[arg(long)]
        k: u32,
        /// Monodromy angle in (0, 1), e.g. `1/7-` for 1/(7+eps).
        #[arg(long)]
        theta: String,
        #[arg(long)]
        sign: SignArg,
    },
    /// Rule-out test for a cobordism cylinder, ends given as MULT@PARAM.
    Cylinder {
        /// Top end, e.g. `20@13/2+`.
        #[arg(long)]
        top: String,
        /// Bottom end, e.g. `21@7+`.
        #[arg(long)]
        bottom: String,
        /// Also test the positive-end partition (imported background,
        /// not exercised by the recorded computations).
        #[arg(long = "check-top")]
        check_top: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    Neg,
    Pos,
}

#[derive(Subcommand)]
enum GlueCmd {
    /// The weight delta_theta(a, b) = b*ceil(a*theta) - a*floor(b*theta).
    Delta {
        /// Monodromy angle in (0, 1).
        #[arg(long)]
        theta: String,
        a: u32,
        b: u32,
    },
    /// Two-part gluing coefficient delta(p2,p2) * delta(p1,p1+p2).
    Coeff {
        /// The two parts, e.g. `5,2`.
        #[arg(long)]
        parts: String,
        /// Monodromy angle in (0, 1).
        #[arg(long)]
        theta: String,
    },
}

#[derive(Subcommand)]
enum StabCmd {
    /// Index condition plus exhaustive decomposition search; reports the
    /// conditional bound c_k(x) >= t/m when the criterion is met.
    Check {
        #[arg(long)]
        m: u32,
        /// Ellipsoid parameter with nonzero tilt, e.g. `7+`.
        #[arg(long)]
        x: String,
        #[arg(long)]
        t: u32,
    },
}

#[derive(Subcommand)]
enum CertCmd {
    /// Build the certificate for an element of M(m, 3m-1+eps, 3m-1).
    Build {
        #[arg(long)]
        m: u32,
        /// Write the certificate here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a certificate file and print the check report.
    Verify { path: PathBuf },
    /// Expected element count from the staged gluing coefficients.
    Count {
        #[arg(long)]
        m: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let json = cli.json;
    match cli.cmd {
        Cmd::C0(args) => cmd_c0(json, args),
        Cmd::Ck { x } => cmd_ck(json, &x),
        Cmd::Index(sub) => cmd_index(json, sub),
        Cmd::Ech(sub) => cmd_ech(json, sub),
        Cmd::Glue(sub) => cmd_glue(json, sub),
        Cmd::Stab(sub) => cmd_stab(json, sub),
        Cmd::Cert(sub) => cmd_cert(json, sub),
    }
}

// ---- parsing and printing helpers ----

fn parse_prat(s: &str) -> Result<PRat, Error> {
    s.parse()
}

fn require_param(s: &str) -> Result<PRat, Error> {
    let p = parse_prat(s)?;
    if p.cmp_int(1) != std::cmp::Ordering::Greater {
        return Err(Error::Domain(format!(
            "ellipsoid parameter must exceed 1, got {p}"
        )));
    }
    Ok(p)
}

fn require_theta(s: &str) -> Result<PRat, Error> {
    let p = parse_prat(s)?;
    if p.cmp_int(0) != std::cmp::Ordering::Greater || p.cmp_int(1) != std::cmp::Ordering::Less {
        return Err(Error::Domain(format!(
            "monodromy angle must lie in (0, 1), got {p}"
        )));
    }
    Ok(p)
}

fn parse_mult_list(s: &str) -> Result<Vec<u32>, Error> {
    s.split(',')
        .filter(|part| !part.trim().is_empty())
        .map(|part| {
            part.trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("invalid multiplicity `{part}`")))
        })
        .collect()
}

/// `MULT@PARAM`, e.g. `20@13/2+`.
fn parse_end(s: &str) -> Result<(u32, PRat), Error> {
    let (mult, param) = s
        .split_once('@')
        .ok_or_else(|| Error::Parse(format!("expected MULT@PARAM, got `{s}`")))?;
    let mult = mult
        .trim()
        .parse::<u32>()
        .map_err(|_| Error::Parse(format!("invalid multiplicity `{mult}`")))?;
    Ok((mult, require_param(param)?))
}

fn approx(v: f64) -> String {
    format!("{v:.5}")
}

fn emit(json_mode: bool, value: Value, human: String) {
    if json_mode {
        println!("{value}");
    } else {
        println!("{human}");
    }
}

fn cap_value_json(v: &CapValue<Int>) -> Value {
    match v {
        CapValue::Rational(r) => json!({"kind": "rational", "value": format_ratio(r)}),
        CapValue::Sqrt(r) => json!({"kind": "sqrt", "radicand": format_ratio(r)}),
    }
}

fn partition_json(p: &Partition) -> Value {
    Value::Array(p.parts().iter().map(|&x| json!(x)).collect())
}

// ---- subcommands ----

fn cmd_c0(json: bool, args: C0Args) -> Result<u8, Error> {
    if args.x == "staircase" {
        let steps = args
            .steps
            .ok_or_else(|| Error::Domain("staircase mode needs --steps N".into()))?;
        let pieces = capacity::c0_staircase::<Int>(steps);
        if let Some(path) = &args.csv {
            let csv = capacity::staircase_csv(&pieces);
            std::fs::write(path, csv)
                .map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display())))?;
            emit(
                json,
                json!({"pieces": pieces.len(), "written": path.display().to_string()}),
                format!("wrote {} pieces to {}", pieces.len(), path.display()),
            );
            return Ok(0);
        }
        if json {
            let rows: Vec<Value> = pieces
                .iter()
                .map(|p| {
                    json!({
                        "lo": format_ratio(&p.lo),
                        "hi": format_ratio(&p.hi),
                        "kind": p.kind_name(),
                        "parameter": format_ratio(p.parameter()),
                    })
                })
                .collect();
            println!("{}", Value::Array(rows));
        } else {
            for p in &pieces {
                println!(
                    "{} {} on [{}, {}]",
                    p.kind_name(),
                    format_ratio(p.parameter()),
                    format_ratio(&p.lo),
                    format_ratio(&p.hi)
                );
            }
        }
        return Ok(0);
    }
    if args.steps.is_some() || args.csv.is_some() {
        return Err(Error::Domain(
            "--steps and --csv apply to `c0 staircase` only".into(),
        ));
    }
    let x: Rat = parse_ratio(&args.x)?;
    let value = capacity::c0(&x)?;
    emit(
        json,
        json!({"x": format_ratio(&x), "c0": cap_value_json(&value)}),
        format!(
            "c0({}) = {} ~ {}",
            format_ratio(&x),
            value,
            approx(value.approx())
        ),
    );
    Ok(0)
}

fn cmd_ck(json: bool, x: &str) -> Result<u8, Error> {
    let x: Rat = parse_ratio(x)?;
    match capacity::ck_known(&x, 1)? {
        KnownResult::Exact { value, source } => {
            emit(
                json,
                json!({
                    "x": format_ratio(&x),
                    "exact": cap_value_json(&value),
                    "source": source,
                }),
                format!(
                    "c_k({}) = {} ~ {}   [{}]",
                    format_ratio(&x),
                    value,
                    approx(value.approx()),
                    source
                ),
            );
        }
        KnownResult::Bounds {
            lower,
            upper,
            lower_source,
            upper_source,
        } => {
            let lo_f = ratio_approx(&lower);
            let hi_f = ratio_approx(&upper);
            emit(
                json,
                json!({
                    "x": format_ratio(&x),
                    "lower": format_ratio(&lower),
                    "upper": format_ratio(&upper),
                    "lower_source": lower_source,
                    "upper_source": upper_source,
                }),
                format!(
                    "{} <= c_k({}) <= {}   (~ {} .. {})\n  lower: {}\n  upper: {}",
                    format_ratio(&lower),
                    format_ratio(&x),
                    format_ratio(&upper),
                    approx(lo_f),
                    approx(hi_f),
                    lower_source,
                    upper_source
                ),
            );
        }
    }
    Ok(0)
}

fn cmd_index(json: bool, sub: IndexCmd) -> Result<u8, Error> {
    match sub {
        IndexCmd::Curve { m, x, short, long } => {
            let param = require_param(&x)?;
            let spec = index::CurveSpec {
                degree: m,
                param,
                short_ends: short
                    .as_deref()
                    .map(parse_mult_list)
                    .transpose()?
                    .unwrap_or_default(),
                long_ends: long
                    .as_deref()
                    .map(parse_mult_list)
                    .transpose()?
                    .unwrap_or_default(),
            };
            if spec
                .short_ends
                .iter()
                .chain(&spec.long_ends)
                .any(|&e| e == 0)
            {
                return Err(Error::Domain("end multiplicities must be positive".into()));
            }
            let half = index::half_index_curve(&spec);
            emit(
                json,
                json!({"half_index": half.to_string()}),
                format!("half-index {half}"),
            );
            Ok(0)
        }
        IndexCmd::Orbit { orbit, mult, param } => {
            if mult == 0 {
                return Err(Error::Domain("multiplicity must be positive".into()));
            }
            let spec = index::OrbitSpec {
                orbit: orbit.into(),
                mult,
                param: require_param(&param)?,
            };
            let half = index::half_index_orbit_cyl(&spec);
            emit(
                json,
                json!({"half_index": half.to_string()}),
                format!("half-index {half}"),
            );
            Ok(0)
        }
    }
}

fn cmd_ech(json: bool, sub: EchCmd) -> Result<u8, Error> {
    match sub {
        EchCmd::Grading { mult, param } => {
            if mult == 0 {
                return Err(Error::Domain("multiplicity must be positive".into()));
            }
            let z = require_param(&param)?;
            let g = ech::half_grading(mult, &z);
            emit(json, json!({"half_grading": g.to_string()}), format!("{g}"));
            Ok(0)
        }
        EchCmd::Partition { k, theta, sign } => {
            if k == 0 {
                return Err(Error::Domain("total multiplicity must be positive".into()));
            }
            let theta = require_theta(&theta)?;
            let (name, partition) = match sign {
                SignArg::Neg => ("neg", ech::ech_partition_neg(k, &theta)),
                SignArg::Pos => ("pos", ech::ech_partition_pos(k, &theta)),
            };
            emit(
                json,
                json!({
                    "k": k,
                    "theta": theta.to_string(),
                    "sign": name,
                    "partition": partition_json(&partition),
                }),
                format!("{partition}"),
            );
            Ok(0)
        }
        EchCmd::Cylinder {
            top,
            bottom,
            check_top,
        } => {
            let (s, y) = parse_end(&top)?;
            let (t, x) = parse_end(&bottom)?;
            let verdict = ech::cylinder_verdict(s, &y, t, &x, check_top)?;
            let (value, code) = match &verdict {
                CylVerdict::NotRuledOut => (json!({"verdict": "not_ruled_out"}), 0),
                CylVerdict::ImpossibleNegIndex { ech_half_index } => (
                    json!({
                        "verdict": "impossible_neg_index",
                        "ech_half_index": ech_half_index.to_string(),
                    }),
                    1,
                ),
                CylVerdict::ImpossiblePartition { end, expected } => (
                    json!({
                        "verdict": "impossible_partition",
                        "end": match end { EndSide::Top => "top", EndSide::Bottom => "bottom" },
                        "expected": partition_json(expected),
                    }),
                    1,
                ),
            };
            emit(json, value, format!("{verdict}"));
            Ok(code)
        }
    }
}

fn cmd_glue(json: bool, sub: GlueCmd) -> Result<u8, Error> {
    match sub {
        GlueCmd::Delta { theta, a, b } => {
            if a == 0 || b == 0 {
                return Err(Error::Domain("arguments must be positive".into()));
            }
            let theta = require_theta(&theta)?;
            let d = ech::gluing_delta(&theta, a as u64, b as u64);
            emit(json, json!({"delta": d.to_string()}), format!("{d}"));
            Ok(0)
        }
        GlueCmd::Coeff { parts, theta } => {
            let parts = parse_mult_list(&parts)?;
            let [p1, p2]: [u32; 2] = parts.as_slice().try_into().map_err(|_| {
                Error::UnsupportedPartition(format!(
                    "coefficients are modelled for exactly two parts, got {}",
                    parts.len()
                ))
            })?;
            let (p1, p2) = (p1.max(p2), p1.min(p2));
            let theta = require_theta(&theta)?;
            let c = ech::gluing_coeff_two_parts(p1, p2, &theta)?;
            emit(json, json!({"coefficient": c.to_string()}), format!("{c}"));
            Ok(0)
        }
    }
}

fn cmd_stab(json: bool, sub: StabCmd) -> Result<u8, Error> {
    let StabCmd::Check { m, x, t } = sub;
    let x = require_param(&x)?;
    let verdict = stabilize::stab_check::<Int>(m, &x, t)?;
    let decomposition_json = verdict
        .decomposition
        .as_ref()
        .map(|d| Value::Array(d.pairs.iter().map(|&(mi, ti)| json!([mi, ti])).collect()));
    let bound_json = verdict.lower_bound.as_ref().map(format_ratio);
    let mut human = String::new();
    human.push_str(&format!(
        "index condition 3m = t + ceil(t/x): {}\n",
        if verdict.index_ok {
            "satisfied"
        } else {
            "fails"
        }
    ));
    match &verdict.decomposition {
        Some(d) => human.push_str(&format!("decomposition: {d}\n")),
        None => human.push_str("decomposition: none\n"),
    }
    match &verdict.lower_bound {
        Some(b) => {
            let f = ratio_approx(b);
            human.push_str(&format!(
                "bound: c_k({x}) >= {} ~ {}   ({})",
                format_ratio(b),
                approx(f),
                verdict.caveat
            ));
        }
        None => human.push_str("no stabilization bound"),
    }
    emit(
        json,
        json!({
            "index_ok": verdict.index_ok,
            "decomposition": decomposition_json,
            "lower_bound": bound_json,
            "caveat": verdict.caveat,
        }),
        human,
    );
    Ok(if verdict.lower_bound.is_some() { 0 } else { 1 })
}

fn cmd_cert(json: bool, sub: CertCmd) -> Result<u8, Error> {
    match sub {
        CertCmd::Build { m, out } => {
            if m == 0 {
                return Err(Error::Domain("degree must be positive".into()));
            }
            let cert = building::construct_theorem_curve::<Int>(m);
            let text = building::certificate_to_json(&cert);
            match out {
                Some(path) => {
                    std::fs::write(&path, &text).map_err(|e| {
                        Error::Domain(format!("cannot write {}: {e}", path.display()))
                    })?;
                    emit(
                        json,
                        json!({"written": path.display().to_string(), "m": m}),
                        format!("wrote certificate for m = {m} to {}", path.display()),
                    );
                }
                None => print!("{text}"),
            }
            Ok(0)
        }
        CertCmd::Verify { path } => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))?;
            let cert: BuildingCertificate<Int> = building::certificate_from_json(&text)?;
            let report = building::verify_certificate(&cert)?;
            if json {
                println!(
                    "{}",
                    serde_json::to_value(&report).expect("report serialization")
                );
            } else {
                println!("{report}");
            }
            Ok(if report.pass { 0 } else { 1 })
        }
        CertCmd::Count { m } => {
            if m == 0 {
                return Err(Error::Domain("degree must be positive".into()));
            }
            let count = building::expected_count::<Int>(m);
            emit(
                json,
                json!({"count": count.to_string()}),
                format!("{count}"),
            );
            Ok(0)
        }
    }
}
