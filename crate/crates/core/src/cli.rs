//! Command-line surface of `frameadm`.
//!
//! Every subcommand parses its JSON inputs (inline or from a file), runs one
//! library computation and renders a report as JSON or indented text. Exit
//! codes: 0 success or pass, 1 not admissible or failed verification, 2 input
//! error, 3 undetermined.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::admissibility::{self, Status};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::formats::{self, OperatorSpec, SequenceInput, SynthesisMode, SynthesisRequest};
use crate::frames::{self, Frame, VerificationReport};
use crate::operators::{self, FiniteHermitian, OperatorModel};
use crate::schur_horn;
use crate::sequences::{self, RealVec, SequenceModel};
use crate::synthesis;
use crate::tol::DEFAULT_TOL;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNDETERMINED: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "frameadm", version, about = "Frame admissibility: majorization functionals, Schur-Horn and frame synthesis")]
pub struct Cli {
    /// Numerical tolerance for comparisons.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Number of k-indexed conditions checked explicitly.
    #[arg(long, global = true, default_value_t = admissibility::DEFAULT_HORIZON)]
    pub horizon: usize,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct FunctionalArgs {
    /// Sequence: JSON array, sequence spec, or a path to either.
    #[arg(long)]
    pub sequence: Option<String>,
    /// Operator spec (JSON or path).
    #[arg(long)]
    pub operator: Option<String>,
    /// Evaluate at this k.
    #[arg(long, conflicts_with = "max_k")]
    pub k: Option<usize>,
    /// Emit the table for k = 1..=max-k.
    #[arg(long)]
    pub max_k: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Majorant b (JSON array or path).
    #[arg(long)]
    pub b: String,
    /// Candidate c (JSON array or path).
    #[arg(long)]
    pub c: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Upper functional U_k of a sequence and/or operator.
    Uk(FunctionalArgs),
    /// Lower functional L_k of a sequence and/or operator.
    Lk(FunctionalArgs),
    /// Test c ≺ b for finite vectors.
    Majorize(PairArgs),
    /// Orthogonal Q with diag(Qᵀ diag(b) Q) = c.
    SchurHorn(PairArgs),
    /// Classify a pair (S, c) as admissible, not admissible or undetermined.
    Check {
        #[arg(long)]
        operator: String,
        #[arg(long)]
        sequence: String,
    },
    /// Build a frame for (S, c).
    Synthesize {
        /// Full synthesis request (JSON or path); overrides the other options.
        #[arg(long, conflicts_with_all = ["operator", "sequence"])]
        request: Option<String>,
        #[arg(long, required_unless_present = "request")]
        operator: Option<String>,
        #[arg(long, required_unless_present = "request")]
        sequence: Option<String>,
        #[arg(long, value_enum, default_value_t = SynthesisMode::Finite)]
        mode: SynthesisMode,
        /// Truncation length for `truncated` mode.
        #[arg(long = "n")]
        n: Option<usize>,
        /// Decomposition rounds for `greedy` mode.
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Check a frame against a target pair.
    Verify {
        /// Frame file, or the output of `synthesize` (its target is used by default).
        #[arg(long)]
        frame: String,
        #[arg(long)]
        operator: Option<String>,
        #[arg(long)]
        sequence: Option<String>,
    },
    /// Excess of a finite frame, or whether a pair forces infinite excess.
    Excess {
        #[arg(long, conflicts_with_all = ["operator", "sequence"])]
        frame: Option<String>,
        #[arg(long, requires = "sequence", required_unless_present = "frame")]
        operator: Option<String>,
        #[arg(long, requires = "operator")]
        sequence: Option<String>,
    },
    /// Run a named worked example.
    Examples {
        /// One of 6.1, 6.2, 6.3, 6.6, 4.8, 6.7; all when omitted.
        name: Option<String>,
    },
}

/// Outcome of one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    /// Rendered report; empty when it was written to `--out`.
    pub output: String,
}

/// A frame together with the finite pair it was built for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthesisOutput {
    pub mode: SynthesisMode,
    pub frame: Frame,
    pub target: Target,
    pub report: VerificationReport,
    pub excess: usize,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub detail: Value,
}

/// The finite `(S, c)` a frame is checked against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub operator: Vec<Vec<f64>>,
    pub norms: Vec<f64>,
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotAdmissible { .. } | Error::NotMajorized { .. } | Error::TruncationInadmissible { .. } | Error::NumericalFailure(_) => EXIT_FAIL,
        Error::SufficiencyFailed { .. } | Error::HorizonExceeded { .. } => EXIT_UNDETERMINED,
        _ => EXIT_INPUT,
    }
}

fn status_code(s: Status) -> i32 {
    match s {
        Status::Admissible => EXIT_OK,
        Status::NotAdmissible => EXIT_FAIL,
        Status::Undetermined => EXIT_UNDETERMINED,
    }
}

fn pass_code(pass: bool) -> i32 {
    if pass {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            return Outcome { code, output: e.render().to_string() };
        }
    };
    let (code, report) = match execute(&cli) {
        Ok(r) => r,
        Err(e) => (exit_code(&e), json!({ "error": e.to_string(), "condition": e.condition_id() })),
    };
    let rendered = match cli.format {
        OutputFormat::Json => serde_json::to_string_pretty(&report).expect("serializable report") + "\n",
        OutputFormat::Text => render_text(&report),
    };
    match &cli.out {
        Some(path) => match std::fs::write(path, &rendered) {
            Ok(()) => Outcome { code, output: String::new() },
            Err(e) => Outcome { code: EXIT_INPUT, output: format!("cannot write {}: {e}\n", path.display()) },
        },
        None => Outcome { code, output: rendered },
    }
}

/// Runs a parsed command, returning the exit code and the report.
pub fn execute(cli: &Cli) -> Result<(i32, Value)> {
    let (tol, horizon) = (cli.tol, cli.horizon);
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be a non-negative number, got {tol}")));
    }
    match &cli.command {
        Command::Uk(a) => functional(a, true),
        Command::Lk(a) => functional(a, false),
        Command::Majorize(p) => {
            let (b, c) = (formats::parse_real_vec(&p.b)?, formats::parse_real_vec(&p.c)?);
            let check = sequences::majorization_check(&b, &c, tol)?;
            let evidence = check.evidence("finite-majorization", tol);
            Ok((pass_code(check.holds), json!({ "majorized": check.holds, "check": check, "evidence": evidence })))
        }
        Command::SchurHorn(p) => {
            let (b, c) = (formats::parse_real_vec(&p.b)?, formats::parse_real_vec(&p.c)?);
            let chain = schur_horn::t_transform_chain(&b, &c, tol)?;
            let q = schur_horn::construct_diagonal_unitary(&b, &c, tol)?;
            let diag = q.conjugated_diagonal(&b);
            let diagonal_residual = diag.iter().zip(c.iter()).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
            let rows: Vec<Vec<f64>> = q.matrix().row_iter().map(|r| r.iter().copied().collect()).collect();
            Ok((
                EXIT_OK,
                json!({
                    "unitary": rows,
                    "diagonal": diag,
                    "diagonal_residual": diagonal_residual,
                    "orthogonality_residual": q.orthogonality_residual(),
                    "chain": chain,
                }),
            ))
        }
        Command::Check { operator, sequence } => {
            let s = formats::parse_operator(operator)?;
            let c = formats::parse_sequence(sequence)?;
            let verdict = admissibility::classify(&s, &c, horizon, tol)?;
            let spectrum = operators::spectral_summary(&s, sequences::DEFAULT_ACCURACY)?;
            Ok((status_code(verdict.status), json!({ "status": verdict.status, "verdict": verdict, "spectrum": spectrum })))
        }
        Command::Synthesize { request, operator, sequence, mode, n, steps } => {
            let req = match request {
                Some(r) => formats::parse::<SynthesisRequest>(r)?,
                None => SynthesisRequest {
                    operator: formats::parse::<OperatorSpec>(operator.as_deref().expect("required by clap"))?,
                    sequence: formats::parse::<SequenceInput>(sequence.as_deref().expect("required by clap"))?,
                    mode: *mode,
                    n: *n,
                    steps: *steps,
                    tol: None,
                    horizon: None,
                },
            };
            let out = synthesize(&req, req.tol.unwrap_or(tol), req.horizon.unwrap_or(horizon))?;
            Ok((pass_code(out.report.pass), serde_json::to_value(&out)?))
        }
        Command::Verify { frame, operator, sequence } => {
            let raw = formats::load_json(frame)?;
            let (f, target): (Frame, Option<Target>) = if raw.get("frame").is_some() {
                let o: SynthesisOutput = serde_json::from_value(raw)?;
                (o.frame, Some(o.target))
            } else {
                (serde_json::from_value(raw)?, None)
            };
            let s = match (operator, &target) {
                (Some(op), _) => finite_operator(formats::parse_operator(op)?)?,
                (None, Some(t)) => FiniteHermitian::from_rows(&t.operator)?,
                (None, None) => return Err(Error::InvalidInput("verify needs --operator for a plain frame file".into())),
            };
            let c = match (sequence, &target) {
                (Some(seq), _) => finite_sequence(formats::parse_sequence(seq)?)?,
                (None, Some(t)) => RealVec::new(t.norms.clone())?,
                (None, None) => return Err(Error::InvalidInput("verify needs --sequence for a plain frame file".into())),
            };
            let report = frames::verify_pair(&f, &s, &c, tol)?;
            Ok((pass_code(report.pass), json!({ "pass": report.pass, "report": report, "excess": frames::excess(&f, tol) })))
        }
        Command::Excess { frame, operator, sequence } => match (frame, operator, sequence) {
            (Some(fr), _, _) => {
                let raw = formats::load_json(fr)?;
                let f: Frame = match raw.get("frame") {
                    Some(inner) => serde_json::from_value(inner.clone())?,
                    None => serde_json::from_value(raw)?,
                };
                let bounds = frames::frame_bounds(&f)?;
                Ok((
                    EXIT_OK,
                    json!({
                        "vectors": f.len(),
                        "dim": f.dim(),
                        "rank": frames::synthesis_rank(&f, tol),
                        "excess": frames::excess(&f, tol),
                        "bounds": bounds,
                    }),
                ))
            }
            (None, Some(op), Some(seq)) => {
                let OperatorModel::Diagonal(d) = formats::parse_operator(op)? else {
                    return Err(Error::InvalidInput("forced-excess test needs an infinite diagonal operator".into()));
                };
                let c = formats::parse_sequence(seq)?;
                let forced = admissibility::excess_forced_infinite(&d, &c, tol);
                Ok((EXIT_OK, json!({ "excess_forced_infinite": forced, "alpha_minus": d.diag().liminf(), "liminf_c": c.liminf() })))
            }
            _ => Err(Error::InvalidInput("excess needs --frame, or --operator with --sequence".into())),
        },
        Command::Examples { name } => {
            let names: Vec<&str> = match name {
                Some(n) => vec![n.as_str()],
                None => fixtures::EXAMPLE_NAMES.to_vec(),
            };
            let reports = names.iter().map(|n| fixtures::run_example(n, horizon, tol)).collect::<Result<Vec<_>>>()?;
            let all = reports.iter().all(|r| r.reproduces);
            let body = if reports.len() == 1 { serde_json::to_value(&reports[0])? } else { json!({ "reproduces": all, "examples": reports }) };
            Ok((pass_code(all), body))
        }
    }
}

fn functional(a: &FunctionalArgs, upper: bool) -> Result<(i32, Value)> {
    if a.sequence.is_none() && a.operator.is_none() {
        return Err(Error::InvalidInput("give --sequence, --operator, or both".into()));
    }
    let ks: Vec<usize> = match (a.k, a.max_k) {
        (Some(k), None) => vec![k],
        (None, Some(m)) => (1..=m).collect(),
        _ => return Err(Error::InvalidInput("give --k or --max-k".into())),
    };
    if ks.contains(&0) {
        return Err(Error::KMismatch { k: 0, len: 0 });
    }
    let seq = a.sequence.as_deref().map(formats::parse_sequence).transpose()?;
    let op = a.operator.as_deref().map(formats::parse_operator).transpose()?;
    let mut rows = Vec::with_capacity(ks.len());
    for k in ks {
        let mut row = json!({ "k": k });
        if let Some(s) = &seq {
            let v = if upper { sequences::u_k_seq(s, k)? } else { sequences::l_k_seq(s, k)? };
            row["sequence"] = serde_json::to_value(v)?;
        }
        if let Some(o) = &op {
            let v = if upper { operators::u_k_op(o, k)? } else { operators::l_k_op(o, k)? };
            row["operator"] = serde_json::to_value(v)?;
        }
        rows.push(row);
    }
    Ok((EXIT_OK, json!({ "functional": if upper { "U_k" } else { "L_k" }, "values": rows })))
}

fn finite_operator(op: OperatorModel) -> Result<FiniteHermitian> {
    match op {
        OperatorModel::Finite(m) => Ok(m),
        OperatorModel::Diagonal(_) => Err(Error::InvalidInput("this mode needs a finite operator".into())),
    }
}

fn infinite_operator(op: OperatorModel) -> Result<operators::DiagonalOperator> {
    match op {
        OperatorModel::Diagonal(d) => Ok(d),
        OperatorModel::Finite(_) => Err(Error::InvalidInput("this mode needs an infinite diagonal operator".into())),
    }
}

fn finite_sequence(c: SequenceModel) -> Result<RealVec> {
    if !c.is_finite() {
        return Err(Error::InvalidInput("this mode needs a finite norm sequence".into()));
    }
    RealVec::new(c.head().to_vec())
}

fn rows_of_diag(diag: &[f64]) -> Vec<Vec<f64>> {
    (0..diag.len())
        .map(|i| {
            let mut r = vec![0.0; diag.len()];
            r[i] = diag[i];
            r
        })
        .collect()
}

/// Runs a synthesis request and verifies the result against its finite target.
pub fn synthesize(req: &SynthesisRequest, tol: f64, horizon: usize) -> Result<SynthesisOutput> {
    let s = req.operator.build()?;
    let c = req.sequence.build()?;
    let (frame, target, detail) = match req.mode {
        SynthesisMode::Finite => {
            let s = finite_operator(s)?;
            let c = finite_sequence(c)?;
            let f = synthesis::synthesize_finite(&s, &c, tol)?;
            (f, Target { operator: s.to_rows(), norms: c.into_vec() }, Value::Null)
        }
        SynthesisMode::Truncated => {
            let s = finite_operator(s)?;
            let n = req.n.ok_or_else(|| Error::InvalidInput("truncated mode needs N".into()))?;
            let t = synthesis::synthesize_truncated_summable(&s, &c, n, tol)?;
            let detail = json!({ "tail_mass": t.tail_mass });
            (t.frame, Target { operator: s.to_rows(), norms: t.norms }, detail)
        }
        SynthesisMode::Head => {
            let d = infinite_operator(s)?;
            let dec = synthesis::head_decompose(&d, &c, horizon, tol)?;
            let inv = dec.invariants(tol)?;
            let detail = json!({ "decomposition": dec, "invariants": inv, "invariants_hold": inv.hold(tol) });
            (dec.head_frame()?, Target { operator: rows_of_diag(&dec.block()), norms: dec.c0.clone() }, detail)
        }
        SynthesisMode::Greedy => {
            let d = infinite_operator(s)?;
            let dec = synthesis::head_decompose(&d, &c, horizon, tol)?;
            let steps = req.steps.unwrap_or(5);
            let ext = synthesis::greedy_extend(&dec, &c, steps, horizon, tol)?;
            let dim = ext.frame.dim();
            let realized: Vec<f64> = (0..dim).map(|i| d.diag().get(i).expect("infinite") - ext.residual.get(i).expect("infinite")).collect();
            let detail = json!({
                "steps_requested": steps,
                "steps_completed": ext.steps_completed,
                "stopped_early": ext.stopped_early,
                "consumed_coordinates": ext.consumed_coordinates,
                "operator_deviation": synthesis::greedy_operator_deviation(&ext, &d),
            });
            let norms = c.truncate(ext.consumed_norms());
            (ext.frame, Target { operator: rows_of_diag(&realized), norms }, detail)
        }
    };
    let s_target = FiniteHermitian::from_rows(&target.operator)?;
    let report = frames::verify_pair(&frame, &s_target, &RealVec::new(target.norms.clone())?, tol)?;
    let excess = frames::excess(&frame, tol);
    Ok(SynthesisOutput { mode: req.mode, frame, target, report, excess, detail })
}

/// Indented `key: value` rendering of a JSON report.
pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    render_into(v, 0, &mut out);
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|i| matches!(i, Value::Number(_) | Value::Bool(_) | Value::Null)) => {
            Some(format!("[{}]", items.iter().map(|i| scalar(i).expect("scalar")).collect::<Vec<_>>().join(", ")))
        }
        _ => None,
    }
}

fn render_into(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                match scalar(val) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_into(val, indent + 1, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match scalar(item) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        render_into(item, indent + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).expect("scalar"))),
    }
}
