//! `hadalg` command line: reads JSON documents, prints JSON results on stdout
//! (or `--out`) and a short human-readable summary on stderr.
//!
//! Exit codes: 0 success, 2 a mathematical condition fails (the JSON carries
//! the witness), 3 bad input, 4 numerical failure.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hadalg::algebra::{self, Element};
use hadalg::error::{Error, SeqError, WeightError};
use hadalg::ideals::{self, ChainKind};
use hadalg::json;
use hadalg::matalg::{self, LogOptions, MatElement, SlOptions};
use hadalg::{WeightRegistry, C64};
use serde_json::{json, Value};

mod selfcheck;

pub const EXIT_OK: u8 = 0;
pub const EXIT_MATH: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_NUMERIC: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "hadalg", version, about = "Entire functions under weighted Hadamard multiplication")]
pub struct Cli {
    #[command(flatten)]
    pub config: CliConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CliConfig {
    /// Weight used when a document has no "weight" field, and for generated objects.
    #[arg(long, global = true, default_value = "factorial")]
    pub weight: String,
    /// Tolerance: evaluation error (default 1e-12) or factor-product error (default 1e-9).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Index horizon for horizon-limited scans.
    #[arg(long, global = true, default_value_t = ideals::DEFAULT_HORIZON)]
    pub horizon: usize,
    /// Seed for randomized self-checks.
    #[arg(long, global = true, default_value_t = 20240601)]
    pub seed: u64,
    /// Input document (stdin when absent).
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Output file for the JSON result (stdout when absent).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Operations on single elements and tuples.
    Elem {
        #[command(subcommand)]
        op: ElemOp,
    },
    /// Operations on matrices over the algebra.
    Mat {
        #[command(subcommand)]
        op: MatOp,
    },
    /// Index orders, Krull family, chains and annihilators.
    Ideal {
        #[command(subcommand)]
        op: IdealOp,
    },
    /// Weight sequences.
    Weight {
        #[command(subcommand)]
        op: WeightOp,
    },
    /// Randomized ring-law and criterion checks.
    Selfcheck {
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum ElemOp {
    /// Sup norm of the normalized coefficients.
    Norm,
    /// Value at a point with a certified truncation bound.
    Eval {
        /// Point as `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Inverse, or the first index where u vanishes.
    Invert,
    /// First element divided by the second.
    Divide,
    /// Greatest common divisor of all elements.
    Gcd,
    /// Is the first element in the ideal generated by the rest?
    IdealMember,
    /// Solutions g_i of sum g_i f_i = eps.
    Corona,
    /// Pointwise exponential.
    Exp,
    /// Principal logarithm of an invertible element.
    Log,
    /// Idempotency test.
    Idempotent {
        /// Treat the input sequence as a mask and build the idempotent.
        #[arg(long)]
        from_mask: bool,
    },
    /// Invertible element within 2 eps.
    ApproxInvert {
        #[arg(long)]
        eps: f64,
    },
    /// Elements `[f1, f2, g1, g2]` with `g1 f1 + g2 f2 = eps`.
    BassReduce {
        #[arg(long, default_value_t = algebra::BASS_EPSILON)]
        threshold: f64,
    },
}

#[derive(Subcommand, Debug)]
pub enum MatOp {
    /// Product of the matrices, left to right.
    Mul,
    /// Determinant.
    Det,
    /// Minimal-norm solution of `A x = b`; input matrices `[A, b]`.
    Solve {
        #[arg(long, default_value_t = matalg::DEFAULT_RTOL)]
        rtol: f64,
    },
    /// Matrix exponential.
    Exp,
    /// Logarithm, cross-checked by contour quadrature.
    Log {
        #[arg(long, default_value_t = 2048)]
        nodes: usize,
        #[arg(long, default_value_t = 1e-6)]
        agreement_tol: f64,
    },
    /// Product of elementary matrices for an SL_n element.
    SlFactor {
        #[arg(long, default_value_t = 0.5)]
        step_norm: f64,
    },
    /// Spectral sup norm against the entrywise bound.
    NormBounds,
    /// Resolvent bound check at a point.
    Resolvent {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long)]
        c2: f64,
        #[arg(long)]
        b2: f64,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum KindArg {
    Noetherian,
    Artinian,
}

#[derive(Subcommand, Debug)]
pub enum IdealOp {
    /// Zero-run length from index k.
    IndexOrder {
        #[arg(long)]
        k: usize,
    },
    /// Zero blocks of the witness family f_n up to the horizon.
    KrullFamily {
        #[arg(long)]
        n: u32,
    },
    /// `m(f, 2^k) / k^exponent` as JSON lines.
    Trajectory {
        #[arg(long)]
        exponent: u32,
        /// Use the family member f_n instead of an input document.
        #[arg(long)]
        krull: Option<u32>,
    },
    /// Generator of the annihilator of f.
    Annihilator,
    /// Witness for a strict step of an ideal chain.
    Chain {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        n: usize,
    },
    /// `|u_f(k)|` along a strictly increasing index list.
    Nonfixed {
        /// Comma-separated indices.
        #[arg(long)]
        ks: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum WeightOp {
    /// Built-in weights.
    List,
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Doc(Value),
    Lines(Vec<Value>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: u8,
    pub output: Output,
    pub summary: String,
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotInvertible(_)
        | Error::NotDivisible(_)
        | Error::NotInIdeal(_)
        | Error::CoronaFails(_)
        | Error::Inconsistent { .. }
        | Error::NotInGL(_)
        | Error::NotSL { .. }
        | Error::SpectrumHit(_)
        | Error::PreconditionFailed(_)
        | Error::BadMask(_)
        | Error::Seq(SeqError::PointwiseDomain(_)) => EXIT_MATH,
        Error::Parse(_)
        | Error::Weight(WeightError::UnknownWeight(_) | WeightError::InvalidParameters(_))
        | Error::WeightMismatch(..)
        | Error::DimensionMismatch(_)
        | Error::EmptyInput
        | Error::HorizonCertifiedOnly
        | Error::Seq(SeqError::EmptyCycle | SeqError::NonFinite(_) | SeqError::InvalidWindow { .. }) => EXIT_INPUT,
        _ => EXIT_NUMERIC,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Weight(_) => "Weight",
        Error::Seq(_) => "Sequence",
        Error::WeightMismatch(..) => "WeightMismatch",
        Error::HorizonCertifiedOnly => "HorizonCertifiedOnly",
        Error::NotInvertible(_) => "NotInvertible",
        Error::NotDivisible(_) => "NotDivisible",
        Error::NotInIdeal(_) => "NotInIdeal",
        Error::CoronaFails(_) => "CoronaFails",
        Error::PreconditionFailed(_) => "PreconditionFailed",
        Error::BadMask(_) => "BadMask",
        Error::EmptyInput => "EmptyInput",
        Error::DimensionMismatch(_) => "DimensionMismatch",
        Error::Inconsistent { .. } => "Inconsistent",
        Error::NotInGL(_) => "NotInGL",
        Error::NotSL { .. } => "NotSL",
        Error::QuadratureDisagreement { .. } => "QuadratureDisagreement",
        Error::SubdivisionOverflow { .. } => "SubdivisionOverflow",
        Error::SpectrumHit(_) => "SpectrumHit",
        Error::Numerical(_) => "Numerical",
        Error::Parse(_) => "Parse",
    }
}

fn pair(z: C64) -> Value {
    json!([z.re, z.im])
}

/// Error document with whatever witness the error carries.
pub fn error_doc(e: &Error) -> Value {
    let mut doc = json!({ "error": error_kind(e), "message": e.to_string() });
    let witness = match e {
        Error::NotInvertible(i)
        | Error::NotDivisible(i)
        | Error::NotInIdeal(i)
        | Error::CoronaFails(i)
        | Error::BadMask(i)
        | Error::Seq(SeqError::PointwiseDomain(i)) => Some(json!({ "index": i })),
        Error::NotInGL(k) | Error::SpectrumHit(k) => Some(json!({ "position": k })),
        Error::Inconsistent { position, witness } => {
            Some(json!({ "position": position, "y": witness.iter().map(|&z| pair(z)).collect::<Vec<_>>() }))
        }
        Error::NotSL { position, deviation } => Some(json!({ "position": position, "deviation": deviation })),
        Error::QuadratureDisagreement { position, difference } => {
            Some(json!({ "position": position, "difference": difference }))
        }
        Error::SubdivisionOverflow { max_steps } => Some(json!({ "max_steps": max_steps })),
        _ => None,
    };
    if let Some(w) = witness {
        doc["witness"] = w;
    }
    doc
}

fn parse_complex(s: &str) -> Result<C64, Error> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{p}` in `{s}`")));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(Error::Parse(format!("expected `re,im`, got `{s}`"))),
    }
}

struct Ctx<'a> {
    config: &'a CliConfig,
    registry: WeightRegistry,
    input: Option<String>,
}

impl Ctx<'_> {
    fn document(&self) -> Result<Value, Error> {
        let text = self.input.as_deref().ok_or_else(|| Error::Parse("no input document".into()))?;
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Fills in a missing "weight" with `--weight`.
    fn with_weight(&self, mut v: Value) -> Value {
        if let Value::Object(map) = &mut v {
            map.entry("weight").or_insert_with(|| Value::String(self.config.weight.clone()));
        }
        v
    }

    /// A single element document or `{"elements": [...]}`.
    fn elements(&self, min: usize, max: usize) -> Result<Vec<Element>, Error> {
        let doc = self.document()?;
        let docs = match doc.get("elements") {
            Some(Value::Array(items)) => items.clone(),
            Some(_) => return Err(Error::Parse("`elements` must be an array".into())),
            None => vec![doc],
        };
        if docs.len() < min || docs.len() > max {
            return Err(Error::Parse(format!("expected {min}..={max} elements, got {}", docs.len())));
        }
        docs.into_iter().map(|d| json::element_from_value(&self.with_weight(d), &self.registry)).collect()
    }

    /// A single matrix document or `{"matrices": [...]}`.
    fn matrices(&self, count: usize) -> Result<Vec<MatElement>, Error> {
        let doc = self.document()?;
        let docs = match doc.get("matrices") {
            Some(Value::Array(items)) => items.clone(),
            Some(_) => return Err(Error::Parse("`matrices` must be an array".into())),
            None => vec![doc],
        };
        if docs.len() != count {
            return Err(Error::Parse(format!("expected {count} matrices, got {}", docs.len())));
        }
        docs.into_iter().map(|d| json::matrix_from_value(&self.with_weight(d), &self.registry)).collect()
    }

    fn weight(&self) -> Result<hadalg::Weight, Error> {
        Ok(self.registry.resolve(&self.config.weight)?)
    }
}

fn ok(doc: Value, summary: impl Into<String>) -> Result<Outcome, Error> {
    Ok(Outcome { code: EXIT_OK, output: Output::Doc(doc), summary: summary.into() })
}

fn el(e: &Element) -> Result<Value, Error> {
    json::element_to_value(e)
}

fn els(es: &[Element]) -> Result<Value, Error> {
    es.iter().map(el).collect::<Result<Vec<_>, _>>().map(Value::Array)
}

fn mat(m: &MatElement) -> Result<Value, Error> {
    json::matrix_to_value(m)
}

fn run_elem(ctx: &Ctx, op: &ElemOp) -> Result<Outcome, Error> {
    match op {
        ElemOp::Norm => {
            let f = &ctx.elements(1, 1)?[0];
            let n = f.norm();
            ok(json!({ "norm": n.value, "exact": n.is_exact() }), format!("norm = {}", n.value))
        }
        ElemOp::Eval { z } => {
            let f = &ctx.elements(1, 1)?[0];
            let z = parse_complex(z)?;
            let e = f.eval_at(z, ctx.config.tol.unwrap_or(1e-12))?;
            ok(
                json!({ "z": pair(z), "value": pair(e.value), "error_bound": e.error_bound, "last_index": e.last_index }),
                format!("f({z}) = {} +/- {:e} (terms 0..={})", e.value, e.error_bound, e.last_index),
            )
        }
        ElemOp::Invert => {
            let f = &ctx.elements(1, 1)?[0];
            let inv = f.inverse()?;
            ok(
                json!({ "invertible": true, "delta": inv.delta, "inverse": el(&inv.inverse)? }),
                format!("invertible, inf |u| = {}", inv.delta),
            )
        }
        ElemOp::Divide => {
            let es = ctx.elements(2, 2)?;
            let q = es[0].divide(&es[1])?;
            ok(json!({ "constant": q.constant, "quotient": el(&q.quotient)? }), format!("divisible with C = {}", q.constant))
        }
        ElemOp::Gcd => {
            let es = ctx.elements(1, usize::MAX)?;
            let d = algebra::gcd(&es)?;
            ok(json!({ "gcd": el(&d)? }), "gcd computed")
        }
        ElemOp::IdealMember => {
            let es = ctx.elements(2, usize::MAX)?;
            let m = es[0].in_ideal(&es[1..])?;
            ok(
                json!({ "member": true, "constant": m.constant, "coefficients": els(&m.coefficients)? }),
                format!("in the ideal with C = {}", m.constant),
            )
        }
        ElemOp::Corona => {
            let es = ctx.elements(1, usize::MAX)?;
            let s = algebra::corona_solve(&es)?;
            ok(
                json!({ "delta": s.delta, "delta_euclid": s.delta_euclid, "solutions": els(&s.solutions)? }),
                format!("corona condition holds with delta = {}", s.delta),
            )
        }
        ElemOp::Exp => {
            let f = &ctx.elements(1, 1)?[0];
            ok(json!({ "exp": el(&f.exp_el()?)? }), "exp computed")
        }
        ElemOp::Log => {
            let g = &ctx.elements(1, 1)?[0];
            let inv = g.inverse()?;
            let l = g.log_el()?;
            let bound = algebra::log_norm_bound(inv.delta, g.norm().value);
            let norm = l.norm().value;
            ok(json!({ "log": el(&l)?, "norm": norm, "bound": bound }), format!("||log g|| = {norm} <= {bound}"))
        }
        ElemOp::Idempotent { from_mask } => {
            let es = ctx.elements(1, usize::MAX)?;
            if *from_mask {
                let built = es
                    .iter()
                    .map(|e| algebra::idempotent_from_mask(e.weight().clone(), e.u()?.clone()))
                    .collect::<Result<Vec<_>, _>>()?;
                return ok(json!({ "idempotents": els(&built)? }), format!("{} idempotents built", built.len()));
            }
            let flags = es.iter().map(|e| e.is_idempotent()).collect::<Result<Vec<_>, _>>()?;
            ok(json!({ "idempotent": flags }), format!("idempotent: {flags:?}"))
        }
        ElemOp::ApproxInvert { eps } => {
            let f = &ctx.elements(1, 1)?[0];
            let g = f.approx_invertible(*eps)?;
            let dist = g.sub(f)?.norm().value;
            let inf = g.u()?.inf_abs();
            ok(
                json!({ "approximant": el(&g)?, "distance": dist, "inf_abs": inf }),
                format!("||g - f|| = {dist} <= {}, inf |u_g| = {inf}", 2.0 * eps),
            )
        }
        ElemOp::BassReduce { threshold } => {
            let es = ctx.elements(4, 4)?;
            let r = algebra::bass_reduce_with(&es[0], &es[1], &es[2], &es[3], *threshold)?;
            ok(
                json!({ "h": el(&r.h)?, "witness": el(&r.witness)?, "delta": r.delta }),
                format!("f1 + h f2 invertible with inf |u| = {}", r.delta),
            )
        }
    }
}

fn run_mat(ctx: &Ctx, op: &MatOp) -> Result<Outcome, Error> {
    match op {
        MatOp::Mul => {
            let ms = ctx.matrices(2)?;
            let p = ms[0].mul(&ms[1])?;
            ok(json!({ "product": mat(&p)? }), format!("{:?} product", p.shape()))
        }
        MatOp::Det => {
            let a = &ctx.matrices(1)?[0];
            ok(json!({ "det": el(&a.det()?)? }), "determinant computed")
        }
        MatOp::Solve { rtol } => {
            let ms = ctx.matrices(2)?;
            let s = matalg::mat_solve(&ms[0], &ms[1], *rtol)?;
            let delta = if s.delta.is_finite() { json!(s.delta) } else { Value::Null };
            ok(
                json!({ "x": mat(&s.x)?, "delta": delta, "max_residual": s.max_residual }),
                format!("solved, delta = {}, residual {:e}", s.delta, s.max_residual),
            )
        }
        MatOp::Exp => {
            let a = &ctx.matrices(1)?[0];
            ok(json!({ "exp": mat(&matalg::mat_exp(a)?)? }), "exp computed")
        }
        MatOp::Log { nodes, agreement_tol } => {
            let a = &ctx.matrices(1)?[0];
            let l = matalg::mat_log_with(a, &LogOptions { nodes: *nodes, agreement_tol: *agreement_tol })?;
            ok(
                json!({
                    "log": mat(&l.log)?,
                    "thetas": l.thetas,
                    "max_disagreement": l.max_disagreement,
                    "max_roundtrip": l.max_roundtrip,
                }),
                format!("log computed; contour gap {:e}, round trip {:e}", l.max_disagreement, l.max_roundtrip),
            )
        }
        MatOp::SlFactor { step_norm } => {
            let a = &ctx.matrices(1)?[0];
            let tol = ctx.config.tol.unwrap_or(1e-9);
            let f = matalg::sl_factor_with(a, &SlOptions { step_norm: *step_norm, tol })?;
            ok(
                json!({
                    "factors": json::factors_to_value(&f.factors)?,
                    "steps": f.steps,
                    "verification": { "max_error": f.max_error, "tol": tol, "holds": f.max_error <= tol },
                }),
                format!("{} elementary factors over {} path steps; max_error = {:e} <= {tol:e}", f.factors.len(), f.steps, f.max_error),
            )
        }
        MatOp::NormBounds => {
            let a = &ctx.matrices(1)?[0];
            let b = a.norm_bounds()?;
            ok(
                json!({ "lower": b.spectral_sup, "upper": b.upper, "holds": b.holds }),
                format!("sup ||U(k)|| = {} <= {}", b.spectral_sup, b.upper),
            )
        }
        MatOp::Resolvent { z, c2, b2 } => {
            let a = &ctx.matrices(1)?[0];
            let checks = matalg::resolvent_bound_check(a, parse_complex(z)?, *c2, *b2)?;
            let rows: Vec<Value> = checks
                .iter()
                .map(|c| json!({ "position": c.position, "lhs": c.lhs, "rhs": c.rhs, "distance": c.distance, "holds": c.holds }))
                .collect();
            let all = checks.iter().all(|c| c.holds);
            ok(json!({ "positions": rows, "holds": all }), format!("resolvent estimate holds at all positions: {all}"))
        }
    }
}

fn report_line(r: &ideals::IndexOrderReport) -> Value {
    serde_json::from_str(&r.to_json_line()).expect("report line is valid JSON")
}

fn run_ideal(ctx: &Ctx, op: &IdealOp) -> Result<Outcome, Error> {
    let horizon = ctx.config.horizon;
    match op {
        IdealOp::IndexOrder { k } => {
            let f = &ctx.elements(1, 1)?[0];
            let r = ideals::index_order(f, *k, horizon)?;
            Ok(Outcome { code: EXIT_OK, output: Output::Lines(vec![report_line(&r)]), summary: format!("m(f, {k}) = {}", r.m) })
        }
        IdealOp::KrullFamily { n } => {
            let w = ctx.weight()?;
            ideals::krull_family(w, *n, horizon)?;
            let mut blocks = Vec::new();
            let mut k = 0u32;
            while k < usize::BITS && (1usize << k) <= horizon {
                let start = 1usize << k;
                let len = (k as usize).checked_pow(n + 1).unwrap_or(usize::MAX);
                blocks.push(json!([start, start.saturating_add(len).min(horizon)]));
                k += 1;
            }
            ok(
                json!({ "weight": ctx.config.weight, "n": n, "horizon": horizon, "zero_blocks": blocks }),
                format!("f_{n}: {} zero blocks up to {horizon} (u = 1 elsewhere)", blocks.len()),
            )
        }
        IdealOp::Trajectory { exponent, krull } => {
            let f = match krull {
                Some(n) => ideals::krull_family(ctx.weight()?, *n, horizon)?,
                None => ctx.elements(1, 1)?.remove(0),
            };
            let points = ideals::growth_trajectory(&f, *exponent, horizon)?;
            let lines = points
                .iter()
                .map(|p| {
                    let mut v = report_line(&p.order);
                    v["k"] = json!(p.k);
                    v["a_k"] = json!(p.a_k);
                    v["ratio"] = if p.ratio.is_finite() { json!(p.ratio) } else { Value::Null };
                    v
                })
                .collect();
            Ok(Outcome { code: EXIT_OK, output: Output::Lines(lines), summary: format!("{} trajectory points (advisory)", points.len()) })
        }
        IdealOp::Annihilator => {
            let f = &ctx.elements(1, 1)?[0];
            ok(json!({ "chi": el(&ideals::annihilator_generator(f)?)? }), "annihilator generator computed")
        }
        IdealOp::Chain { kind, n } => {
            let kind = match kind {
                KindArg::Noetherian => ChainKind::Noetherian,
                KindArg::Artinian => ChainKind::Artinian,
            };
            let (f, report) = ideals::chain_witness(kind, *n, ctx.weight()?)?;
            let pass = report.pass;
            let mut doc = serde_json::to_value(&report).map_err(|e| Error::Numerical(e.to_string()))?;
            doc["witness"] = el(&f)?;
            let code = if pass { EXIT_OK } else { EXIT_MATH };
            Ok(Outcome { code, output: Output::Doc(doc), summary: format!("z^{} witness: {}", report.degree, if pass { "pass" } else { "FAIL" }) })
        }
        IdealOp::Nonfixed { ks } => {
            let f = &ctx.elements(1, 1)?[0];
            let ks = ks
                .split(',')
                .map(|s| s.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad index `{s}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            let t = ideals::nonfixed_ideal_trajectory(f, &ks)?;
            let verdict = match t.in_ideal {
                Some(b) => json!(b),
                None => Value::Null,
            };
            let flag = if t.in_ideal.is_some() { "exact" } else { "advisory" };
            ok(json!({ "ks": ks, "values": t.values, "in_ideal": verdict, "flag": flag }), format!("verdict: {verdict} ({flag})"))
        }
    }
}

fn run_command(ctx: &Ctx, cmd: &Command) -> Result<Outcome, Error> {
    match cmd {
        Command::Elem { op } => run_elem(ctx, op),
        Command::Mat { op } => run_mat(ctx, op),
        Command::Ideal { op } => run_ideal(ctx, op),
        Command::Weight { op: WeightOp::List } => {
            let names = ctx.registry.names();
            ok(json!({ "weights": names }), names.join("\n"))
        }
        Command::Selfcheck { cases } => selfcheck::run(ctx.config.seed, *cases),
    }
}

fn needs_input(cmd: &Command) -> bool {
    !matches!(
        cmd,
        Command::Weight { .. }
            | Command::Selfcheck { .. }
            | Command::Ideal { op: IdealOp::KrullFamily { .. } | IdealOp::Chain { .. } | IdealOp::Trajectory { krull: Some(_), .. } }
    )
}

/// Runs a parsed command line. `stdin` is read only when the command needs
/// a document and `--json` is absent.
pub fn run(cli: &Cli, stdin: &mut dyn Read) -> Outcome {
    let input = if !needs_input(&cli.command) {
        Ok(None)
    } else if let Some(path) = &cli.config.json {
        fs::read_to_string(path).map(Some).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    } else {
        let mut s = String::new();
        stdin.read_to_string(&mut s).map(|_| Some(s)).map_err(|e| Error::Parse(e.to_string()))
    };
    let result = input.and_then(|input| {
        if cli.config.tol.is_some_and(|t| !(t > 0.0)) {
            return Err(Error::Parse("--tol must be positive".into()));
        }
        let ctx = Ctx { config: &cli.config, registry: WeightRegistry::new(), input };
        run_command(&ctx, &cli.command)
    });
    result.unwrap_or_else(|e| Outcome { code: exit_code(&e), output: Output::Doc(error_doc(&e)), summary: format!("error: {e}") })
}

pub fn render(output: &Output) -> String {
    match output {
        Output::Doc(v) => format!("{}\n", serde_json::to_string_pretty(v).expect("serializable")),
        Output::Lines(lines) => lines.iter().map(|l| format!("{l}\n")).collect(),
    }
}

/// Parses `args`, runs, writes output and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let outcome = run(&cli, &mut io::stdin());
    let text = render(&outcome.output);
    let written = match &cli.config.out {
        Some(path) => fs::write(path, &text),
        None => io::stdout().write_all(text.as_bytes()),
    };
    eprintln!("{}", outcome.summary);
    if let Err(e) = written {
        eprintln!("cannot write output: {e}");
        return EXIT_NUMERIC;
    }
    outcome.code
}
