//! Command-line front end. Every command prints exactly one JSON object.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::adder::{
    build_add_pipeline, build_constant_adder, build_two_register_adder, fourier_add_outcome,
    AddMode,
};
use crate::circuit::{Circuit, GateCounts};
use crate::error::Error;
use crate::fourier::{build_inverse_qft, build_qft, qft_counts, Cutoff};
use crate::ripple::{build_ripple_adder, ripple_add, ripple_counts, ripple_qubits};
use crate::scheduler::{adder_depth_formula, qft_depth_formula, schedule, verify_schedule};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Largest width swept exhaustively by `verify` without `--samples`.
pub const EXHAUSTIVE_MAX_N: usize = 5;
/// Largest `n` for which `stats` runs the scheduler instead of formulas.
pub const SCHEDULED_STATS_MAX_N: usize = 64;
/// Largest `n` for which `stats` also builds circuits to cross-check counts;
/// the all-ones constant addend must fit in a `u64`.
pub const CONSTRUCTED_STATS_MAX_N: usize = 63;
pub const STATS_MAX_N: usize = 4096;

#[derive(Debug, Parser)]
#[command(
    name = "qadd",
    version,
    about = "Quantum addition circuits: build, simulate, schedule, verify"
)]
pub struct Cli {
    /// Indent JSON output.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Add two numbers on the simulator.
    Add(AddArgs),
    /// Sweep (a, b) pairs and compare against classical addition.
    Verify(VerifyArgs),
    /// Gate counts, qubit budgets and depths without simulation.
    Stats(StatsArgs),
    /// Emit the time-slice schedule of a circuit.
    Schedule(ScheduleArgs),
    /// Emit a circuit as JSON.
    Dump(BuilderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Constant,
    Tworegister,
    Ripple,
}

impl ModeArg {
    fn fourier(self) -> Option<AddMode> {
        match self {
            ModeArg::Constant => Some(AddMode::Constant),
            ModeArg::Tworegister => Some(AddMode::TwoRegister),
            ModeArg::Ripple => None,
        }
    }
}

/// `--cutoff` value: a rotation order, `auto`, or `none`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutoffArg {
    None,
    Auto,
    MaxK(u32),
}

impl FromStr for CutoffArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(CutoffArg::None),
            "auto" => Ok(CutoffArg::Auto),
            _ => match s.parse::<u32>() {
                Ok(k) if k >= 1 => Ok(CutoffArg::MaxK(k)),
                _ => Err(format!(
                    "expected a rotation order ≥ 1, `auto` or `none`, got `{s}`"
                )),
            },
        }
    }
}

impl CutoffArg {
    pub fn resolve(self, n: usize) -> Cutoff {
        match self {
            CutoffArg::None => Cutoff::None,
            CutoffArg::Auto => Cutoff::auto(n),
            CutoffArg::MaxK(k) => Cutoff::max_k(k),
        }
    }
}

/// Inclusive range of widths: `3` or `1..5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WidthRange {
    pub lo: usize,
    pub hi: usize,
}

impl FromStr for WidthRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .ok()
                .filter(|&v| v >= 1)
                .ok_or_else(|| format!("invalid width `{t}`"))
        };
        let (lo, hi) = match s.split_once("..") {
            Some((lo, hi)) => (parse(lo)?, parse(hi.trim_start_matches('='))?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty width range `{s}`"));
        }
        Ok(WidthRange { lo, hi })
    }
}

#[derive(Debug, Args)]
pub struct AddArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub a: u64,
    #[arg(long)]
    pub b: u64,
    #[arg(long, value_enum, default_value = "constant")]
    pub mode: ModeArg,
    #[arg(long)]
    pub cutoff: Option<CutoffArg>,
    /// Include the executed circuit in the report.
    #[arg(long)]
    pub emit_circuit: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Width or inclusive range of widths, e.g. `3` or `1..5`.
    #[arg(long)]
    pub n: WidthRange,
    #[arg(long, value_enum, default_value = "constant")]
    pub mode: ModeArg,
    #[arg(long)]
    pub cutoff: Option<CutoffArg>,
    /// Check this many random (a, b) pairs per width instead of all of them.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub cutoff: Option<CutoffArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Builder {
    Qft,
    InverseQft,
    ConstantAdder,
    TwoRegisterAdder,
    Ripple,
    AddPipeline,
}

#[derive(Debug, Args)]
pub struct BuilderArgs {
    #[arg(long, value_enum)]
    pub builder: Builder,
    #[arg(long)]
    pub n: usize,
    /// Classical addend for `constant-adder` and constant-mode `add-pipeline`.
    #[arg(long)]
    pub b: Option<u64>,
    #[arg(long)]
    pub cutoff: Option<CutoffArg>,
    /// Adder form used by `add-pipeline`.
    #[arg(long, value_enum, default_value = "constant")]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    #[command(flatten)]
    pub circuit: BuilderArgs,
    /// Reorder commuting (diagonal) gates before packing.
    #[arg(long)]
    pub commuting: bool,
}

/// Text to print and the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

pub type CmdResult = Result<(i32, Value), Failure>;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize to JSON")
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliOutput {
                    code: EXIT_OK,
                    stdout: e.to_string(),
                },
                _ => CliOutput {
                    code: EXIT_USAGE,
                    stdout: json!({"error": e.kind().to_string(), "message": e.to_string().trim(), "kind": "usage"})
                        .to_string(),
                },
            };
        }
    };
    execute(&cli)
}

pub fn execute(cli: &Cli) -> CliOutput {
    let started = Instant::now();
    let result = match &cli.command {
        Command::Add(args) => cmd_add(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Schedule(args) => cmd_schedule(args),
        Command::Dump(args) => cmd_dump(args),
    };
    let (code, mut value) = match result {
        Ok(ok) => ok,
        Err(Failure::Usage(message)) => (
            EXIT_USAGE,
            json!({"error": "usage", "message": message, "kind": "usage"}),
        ),
        Err(Failure::Domain(e)) => (
            EXIT_USAGE,
            json!({"error": error_name(&e), "message": e.to_string(), "kind": "input"}),
        ),
    };
    if cli.timing {
        if let Value::Object(map) = &mut value {
            map.insert(
                "elapsed_ms".into(),
                json!(started.elapsed().as_secs_f64() * 1e3),
            );
        }
    }
    let stdout = if cli.pretty {
        serde_json::to_string_pretty(&value)
    } else {
        serde_json::to_string(&value)
    }
    .expect("JSON values serialize");
    CliOutput { code, stdout }
}

fn error_name(e: &Error) -> &'static str {
    match e {
        Error::ValueOutOfRange { .. } => "ValueOutOfRange",
        Error::RegisterTooLarge { .. } => "RegisterTooLarge",
        Error::QubitIndexError { .. } => "QubitIndexError",
        Error::DimensionMismatch { .. } => "DimensionMismatch",
        Error::NotABasisState { .. } => "NotABasisState",
        Error::AncillaNotRestored { .. } => "AncillaNotRestored",
        Error::NonCommutingGates { .. } => "NonCommutingGates",
        Error::InvalidRotationOrder(_) => "InvalidRotationOrder",
        Error::InvalidLayout(_) => "InvalidLayout",
        Error::InvalidCircuit(_) => "InvalidCircuit",
    }
}

fn resolve_cutoff(mode: ModeArg, cutoff: Option<CutoffArg>, n: usize) -> Result<Cutoff, Failure> {
    let cutoff = cutoff.map_or(Cutoff::None, |c| c.resolve(n));
    if mode == ModeArg::Ripple && !cutoff.is_exact() {
        return Err(Failure::Usage(
            "--cutoff does not apply to the ripple adder".into(),
        ));
    }
    Ok(cutoff)
}

#[derive(Debug, Serialize)]
struct AddReport {
    command: &'static str,
    n: usize,
    a: u64,
    b: u64,
    mode: ModeArg,
    cutoff: Cutoff,
    sum: Option<u64>,
    success_probability: f64,
    qubits: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    b_register: Option<u64>,
    counts: GateCounts,
    #[serde(skip_serializing_if = "Option::is_none")]
    adder_counts: Option<GateCounts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    circuit: Option<Circuit>,
}

pub fn cmd_add(args: &AddArgs) -> CmdResult {
    let cutoff = resolve_cutoff(args.mode, args.cutoff, args.n)?;
    let report = match args.mode.fourier() {
        None => {
            let circuit = build_ripple_adder(args.n)?;
            let sum = ripple_add(args.a, args.b, args.n)?;
            AddReport {
                command: "add",
                n: args.n,
                a: args.a,
                b: args.b,
                mode: args.mode,
                cutoff,
                sum: Some(sum),
                success_probability: 1.0,
                qubits: circuit.num_qubits(),
                b_register: None,
                counts: circuit.counts(),
                adder_counts: None,
                circuit: args.emit_circuit.then_some(circuit),
            }
        }
        Some(mode) => {
            let outcome = fourier_add_outcome(args.a, args.b, args.n, mode, cutoff)?;
            let circuit = build_add_pipeline(args.n, mode, args.b, cutoff)?;
            let adder = match mode {
                AddMode::Constant => build_constant_adder(args.b, args.n, cutoff)?,
                AddMode::TwoRegister => build_two_register_adder(args.n, cutoff),
            };
            AddReport {
                command: "add",
                n: args.n,
                a: args.a,
                b: args.b,
                mode: args.mode,
                cutoff,
                sum: outcome.sum,
                success_probability: outcome.success_probability,
                qubits: outcome.qubits,
                b_register: outcome.b_register,
                counts: circuit.counts(),
                adder_counts: Some(adder.counts()),
                circuit: args.emit_circuit.then_some(circuit),
            }
        }
    };
    Ok((EXIT_OK, to_value(&report)))
}

#[derive(Debug, Clone, Serialize)]
struct Counterexample {
    n: usize,
    a: u64,
    b: u64,
    expected: u64,
    got: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b_register: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct WidthSummary {
    n: usize,
    cases: usize,
    failures: usize,
    mean_success_probability: f64,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    command: &'static str,
    mode: ModeArg,
    cutoff: Option<CutoffArg>,
    exhaustive: bool,
    samples: Option<usize>,
    seed: Option<u64>,
    cases: usize,
    failures: usize,
    mean_success_probability: f64,
    first_counterexample: Option<Counterexample>,
    widths: Vec<WidthSummary>,
}

impl Serialize for CutoffArg {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            CutoffArg::None => s.serialize_str("none"),
            CutoffArg::Auto => s.serialize_str("auto"),
            CutoffArg::MaxK(k) => s.serialize_u32(*k),
        }
    }
}

struct CaseResult {
    passed: bool,
    probability: f64,
    counterexample: Option<Counterexample>,
}

fn check_case(n: usize, a: u64, b: u64, mode: ModeArg, cutoff: Cutoff) -> CaseResult {
    let fail = |expected, got, b_register, error| CaseResult {
        passed: false,
        probability: 0.0,
        counterexample: Some(Counterexample {
            n,
            a,
            b,
            expected,
            got,
            b_register,
            error,
        }),
    };
    match mode.fourier() {
        None => {
            let expected = a + b;
            match ripple_add(a, b, n) {
                Ok(sum) if sum == expected => CaseResult {
                    passed: true,
                    probability: 1.0,
                    counterexample: None,
                },
                Ok(sum) => fail(expected, Some(sum), None, None),
                Err(e) => fail(expected, None, None, Some(e.to_string())),
            }
        }
        Some(fmode) => {
            let expected = (a + b) & ((1u64 << n) - 1);
            match fourier_add_outcome(a, b, n, fmode, cutoff) {
                Ok(o) => {
                    let b_ok = fmode == AddMode::Constant || o.b_register == Some(b);
                    if o.sum == Some(expected) && b_ok {
                        CaseResult {
                            passed: true,
                            probability: o.success_probability,
                            counterexample: None,
                        }
                    } else {
                        let mut r = fail(expected, o.sum, o.b_register, None);
                        r.probability = o.success_probability;
                        r
                    }
                }
                Err(e) => fail(expected, None, None, Some(e.to_string())),
            }
        }
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    let WidthRange { lo, hi } = args.n;
    if args.samples.is_none() && hi > EXHAUSTIVE_MAX_N {
        return Err(Failure::Usage(format!(
            "exhaustive sweeps stop at n = {EXHAUSTIVE_MAX_N}; pass --samples for larger widths"
        )));
    }
    if args.samples == Some(0) {
        return Err(Failure::Usage("--samples must be positive".into()));
    }

    let mut widths = Vec::new();
    let mut cases = 0;
    let mut failures = 0;
    let mut probability_sum = 0.0;
    let mut first_counterexample = None;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    for n in lo..=hi {
        let cutoff = resolve_cutoff(args.mode, args.cutoff, n)?;
        // Surface range problems (register limits) as input errors up front.
        match args.mode.fourier() {
            Some(mode) => crate::statevec::check_register(mode.qubits(n))?,
            None => {
                build_ripple_adder(n)?;
            }
        }
        let pairs: Vec<(u64, u64)> = match args.samples {
            None => (0..1u64 << n)
                .flat_map(|a| (0..1u64 << n).map(move |b| (a, b)))
                .collect(),
            Some(s) => (0..s)
                .map(|_| {
                    (
                        rng.random_range(0..1u64 << n),
                        rng.random_range(0..1u64 << n),
                    )
                })
                .collect(),
        };
        let results: Vec<CaseResult> = pairs
            .par_iter()
            .map(|&(a, b)| check_case(n, a, b, args.mode, cutoff))
            .collect();
        let width_failures = results.iter().filter(|r| !r.passed).count();
        let width_probability: f64 = results.iter().map(|r| r.probability).sum();
        if first_counterexample.is_none() {
            first_counterexample = results.iter().find_map(|r| r.counterexample.clone());
        }
        widths.push(WidthSummary {
            n,
            cases: results.len(),
            failures: width_failures,
            mean_success_probability: width_probability / results.len() as f64,
        });
        cases += results.len();
        failures += width_failures;
        probability_sum += width_probability;
    }

    let report = VerifyReport {
        command: "verify",
        mode: args.mode,
        cutoff: args.cutoff,
        exhaustive: args.samples.is_none(),
        samples: args.samples,
        seed: args.samples.map(|_| args.seed),
        cases,
        failures,
        mean_success_probability: probability_sum / cases as f64,
        first_counterexample,
        widths,
    };
    let code = if failures == 0 {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    };
    Ok((code, to_value(&report)))
}

#[derive(Debug, Serialize)]
struct QubitBudgets {
    constant: usize,
    two_register: usize,
    ripple: usize,
}

#[derive(Debug, Serialize)]
struct StatsReport {
    command: &'static str,
    n: usize,
    cutoff: Cutoff,
    qubits: QubitBudgets,
    qft_hadamards: usize,
    qft_rotations: usize,
    qft_total: usize,
    aqft_rotations: Option<usize>,
    aqft_total: Option<usize>,
    constant_adder_rotations: usize,
    two_register_adder_rotations: usize,
    ripple_counts: GateCounts,
    adder_depth: usize,
    constant_adder_depth: usize,
    qft_depth: usize,
    depth_source: &'static str,
    constructed_counts_match: Option<bool>,
}

/// Rotations in either Fourier adder (constant form with every bit of `b`
/// set): `Σ_{j=1..n} min(j, m)`.
pub fn adder_rotation_count(n: usize, cutoff: Cutoff) -> usize {
    let t = cutoff.value().map_or(n, |m| n.min(m as usize));
    t * (t + 1) / 2 + (n - t) * t
}

pub fn cmd_stats(args: &StatsArgs) -> CmdResult {
    let n = args.n;
    if n == 0 || n > STATS_MAX_N {
        return Err(Failure::Usage(format!("--n must be in 1..={STATS_MAX_N}")));
    }
    let cutoff = args.cutoff.map_or(Cutoff::None, |c| c.resolve(n));
    let full = qft_counts(n, Cutoff::None);
    let approx = (!cutoff.is_exact()).then(|| qft_counts(n, cutoff));
    let adder_rotations = adder_rotation_count(n, cutoff);

    let (adder_depth, constant_adder_depth, qft_depth, depth_source) = if n <= SCHEDULED_STATS_MAX_N
    {
        let all_ones = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
        let two = schedule(&build_two_register_adder(n, cutoff), true)?.depth();
        let constant = schedule(&build_constant_adder(all_ones, n, cutoff)?, true)?.depth();
        let qft = schedule(&build_qft(n, cutoff), false)?.depth();
        (two, constant, qft, "scheduler")
    } else {
        let d = adder_depth_formula(n, cutoff);
        (d, d, qft_depth_formula(n, cutoff), "formula")
    };

    let constructed_counts_match = (n <= CONSTRUCTED_STATS_MAX_N).then(|| {
        let all_ones = (1u64 << n) - 1;
        build_qft(n, Cutoff::None).counts() == full
            && build_qft(n, cutoff).counts() == qft_counts(n, cutoff)
            && build_two_register_adder(n, cutoff).counts().rotations == adder_rotations
            && build_constant_adder(all_ones, n, cutoff)
                .map(|c| c.counts().rotations == adder_rotations)
                .unwrap_or(false)
            && (ripple_qubits(n) > crate::statevec::max_qubits()
                || build_ripple_adder(n)
                    .map(|c| c.counts() == ripple_counts(n))
                    .unwrap_or(false))
    });

    let report = StatsReport {
        command: "stats",
        n,
        cutoff,
        qubits: QubitBudgets {
            constant: n,
            two_register: 2 * n,
            ripple: ripple_qubits(n),
        },
        qft_hadamards: full.hadamards,
        qft_rotations: full.rotations,
        qft_total: full.total,
        aqft_rotations: approx.map(|c| c.rotations),
        aqft_total: approx.map(|c| c.total),
        constant_adder_rotations: adder_rotations,
        two_register_adder_rotations: adder_rotations,
        ripple_counts: ripple_counts(n),
        adder_depth,
        constant_adder_depth,
        qft_depth,
        depth_source,
        constructed_counts_match,
    };
    Ok((EXIT_OK, to_value(&report)))
}

fn build_named(args: &BuilderArgs) -> Result<Circuit, Failure> {
    let n = args.n;
    if n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    let cutoff = args.cutoff.map_or(Cutoff::None, |c| c.resolve(n));
    let need_b = || {
        args.b
            .ok_or_else(|| Failure::Usage("this builder needs --b".into()))
    };
    let ripple_cutoff = || {
        if cutoff.is_exact() {
            Ok(())
        } else {
            Err(Failure::Usage(
                "--cutoff does not apply to the ripple adder".into(),
            ))
        }
    };
    Ok(match args.builder {
        Builder::Qft => build_qft(n, cutoff),
        Builder::InverseQft => build_inverse_qft(n, cutoff),
        Builder::ConstantAdder => build_constant_adder(need_b()?, n, cutoff)?,
        Builder::TwoRegisterAdder => build_two_register_adder(n, cutoff),
        Builder::Ripple => {
            ripple_cutoff()?;
            build_ripple_adder(n)?
        }
        Builder::AddPipeline => match args.mode.fourier() {
            Some(AddMode::Constant) => build_add_pipeline(n, AddMode::Constant, need_b()?, cutoff)?,
            Some(AddMode::TwoRegister) => build_add_pipeline(n, AddMode::TwoRegister, 0, cutoff)?,
            None => {
                ripple_cutoff()?;
                build_ripple_adder(n)?
            }
        },
    })
}

pub fn cmd_dump(args: &BuilderArgs) -> CmdResult {
    Ok((EXIT_OK, to_value(&build_named(args)?)))
}

pub fn cmd_schedule(args: &ScheduleArgs) -> CmdResult {
    let circuit = build_named(&args.circuit)?;
    let s = schedule(&circuit, args.commuting)?;
    debug_assert!(
        circuit.num_qubits() > crate::statevec::max_qubits()
            || verify_schedule(&s, &circuit).is_valid()
    );
    Ok((EXIT_OK, to_value(&s)))
}
