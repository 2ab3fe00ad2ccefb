//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error,
//! 3 conflicting flags.

use std::fmt::Write as _;
use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;

use crate::circuit::{self, metrics, Circuit};
use crate::random::random_state;
use crate::resources::{dc_formulas, hybrid_formulas, midreset_formulas};
use crate::sim::{verify_preparation, Mode, DEFAULT_BRANCH_CAP};
use crate::synth::{compile_dc, compile_hybrid, synthesize_time, Compiled, DcOptions};
use crate::tree::{build_tree, pad_to_power_of_two};
use crate::walgate::{decompose, evaluate_plan, label_probability, Label, OrthPair, ORTHOGONALITY_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFLICT: i32 = 3;

/// Largest `n` accepted by `analyze` and `sweep`.
const MAX_N: usize = 30;
/// Largest `n` for which `--measure` synthesizes circuits.
const MAX_MEASURED_N: usize = 12;

#[derive(Parser, Debug)]
#[command(name = "stateprep", version, about = "Compile and verify amplitude-encoding state preparation circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Time,
    Dc,
    Hybrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SimMode {
    Enumerate,
    Sample,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compile a target vector into a circuit document.
    Compile {
        /// JSON file with {"amplitudes": [...]}.
        input: PathBuf,
        #[arg(long, value_enum, default_value = "dc")]
        method: Method,
        /// Qubits per time-encoded block (hybrid only).
        #[arg(long)]
        lambda: Option<usize>,
        #[arg(long)]
        no_disentangle: bool,
        #[arg(long)]
        parallelize: bool,
        #[arg(long)]
        prune: bool,
        /// Circuit document path; stage bookkeeping goes to `<out>.stages.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate every measurement branch and compare the data register with
    /// the target.
    Verify {
        circuit: PathBuf,
        target: PathBuf,
        #[arg(long, value_enum, default_value = "enumerate")]
        mode: SimMode,
        #[arg(long, default_value_t = 10_000)]
        shots: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Most measured wires allowed when enumerating.
        #[arg(long, default_value_t = DEFAULT_BRANCH_CAP)]
        cap: usize,
    },
    /// Resource formulas for a range of qubit counts, as CSV.
    Analyze {
        /// Range such as `3..8`, or a single value.
        #[arg(long)]
        n: String,
        /// Also synthesize dense circuits and report their metrics.
        #[arg(long)]
        measure: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Hybrid resource formulas over a range of block sizes, as CSV.
    Sweep {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        measure: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build an adaptive local measurement that tells two orthogonal states
    /// apart.
    Distinguish {
        plus: PathBuf,
        minus: PathBuf,
        /// Where to write the measurement plan.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VectorFile {
    amplitudes: Vec<f64>,
    #[serde(default)]
    imag: Option<Vec<f64>>,
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn conflict(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_CONFLICT, message: message.into() }
}

type CliResult = Result<i32, Failure>;

/// Parses `args` (including the program name), runs the command, writes
/// results to `out` and diagnostics to `err`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn std::io::Write) -> CliResult {
    match command {
        Command::Compile { input, method, lambda, no_disentangle, parallelize, prune, out: path } => {
            let opts = DcOptions { disentangle: !no_disentangle, parallelize, prune };
            compile(out, &input, method, lambda, opts, &path)
        }
        Command::Verify { circuit, target, mode, shots, seed, cap } => {
            let mode = match mode {
                SimMode::Enumerate => Mode::Enumerate { cap },
                SimMode::Sample => Mode::Sample { shots, seed },
            };
            verify(out, &circuit, &target, mode)
        }
        Command::Analyze { n, measure, seed } => analyze(out, parse_range(&n)?, measure, seed),
        Command::Sweep { n, lambda, measure, seed } => sweep(out, n, parse_range(&lambda)?, measure, seed),
        Command::Distinguish { plus, minus, out: path } => distinguish(out, &plus, &minus, path.as_deref()),
    }
}

fn emit(out: &mut dyn std::io::Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(|e| usage(format!("cannot write output: {e}")))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn load_vector(path: &Path) -> Result<(Vec<f64>, Option<Vec<f64>>), Failure> {
    let file: VectorFile = serde_json::from_str(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    if let Some(imag) = &file.imag {
        if imag.len() != file.amplitudes.len() {
            return Err(usage(format!("{}: imag and amplitudes differ in length", path.display())));
        }
    }
    Ok((file.amplitudes, file.imag))
}

/// A real target vector, zero-padded to a power-of-two length.
fn load_target(path: &Path) -> Result<Vec<f64>, Failure> {
    let (re, im) = load_vector(path)?;
    if im.is_some_and(|im| im.iter().any(|&v| v != 0.0)) {
        return Err(usage(format!("{}: complex amplitudes are not supported", path.display())));
    }
    if re.is_empty() {
        return Err(usage(format!("{}: empty amplitude list", path.display())));
    }
    Ok(pad_to_power_of_two(&re))
}

fn load_complex(path: &Path) -> Result<Vec<C64>, Failure> {
    let (re, im) = load_vector(path)?;
    let im = im.unwrap_or_else(|| vec![0.0; re.len()]);
    Ok(re.into_iter().zip(im).map(|(a, b)| C64::new(a, b)).collect())
}

fn compile(
    out: &mut dyn std::io::Write,
    input: &Path,
    method: Method,
    lambda: Option<usize>,
    opts: DcOptions,
    path: &Path,
) -> CliResult {
    match (method, lambda) {
        (Method::Hybrid, None) => return Err(conflict("--method hybrid requires --lambda")),
        (Method::Time | Method::Dc, Some(_)) => return Err(conflict("--lambda is only valid with --method hybrid")),
        _ => {}
    }
    if opts.parallelize && (method != Method::Dc || opts.prune) {
        return Err(conflict("--parallelize requires --method dc without --prune"));
    }
    if method == Method::Time && !opts.disentangle {
        return Err(conflict("--no-disentangle does not apply to --method time"));
    }
    let tree = build_tree(&load_target(input)?).map_err(|e| usage(format!("{}: {e}", input.display())))?;
    let compiled = match method {
        Method::Time => Ok(Compiled { circuit: synthesize_time(&tree), stages: Vec::new() }),
        Method::Dc => compile_dc(&tree, opts),
        Method::Hybrid => compile_hybrid(&tree, lambda.unwrap_or_default(), opts),
    }
    .map_err(|e| usage(e.to_string()))?;
    let m = metrics(&compiled.circuit).map_err(|e| usage(e.to_string()))?;
    write(path, &(circuit::to_json(&compiled.circuit) + "\n"))?;
    let mut sidecar = path.as_os_str().to_owned();
    sidecar.push(".stages.json");
    let stages = serde_json::to_string_pretty(&json!({ "stages": compiled.stages })).expect("serializable");
    write(Path::new(&sidecar), &(stages + "\n"))?;
    emit(out, &(serde_json::to_string(&m).expect("serializable") + "\n"))?;
    Ok(EXIT_OK)
}

fn verify(out: &mut dyn std::io::Write, circuit_path: &Path, target: &Path, mode: Mode) -> CliResult {
    let c: Circuit =
        circuit::from_json(&read(circuit_path)?).map_err(|e| usage(format!("{}: {e}", circuit_path.display())))?;
    let x = load_target(target)?;
    let report = verify_preparation(&c, &x, mode).map_err(|e| usage(e.to_string()))?;
    emit(out, &(serde_json::to_string(&report).expect("serializable") + "\n"))?;
    Ok(if report.pass { EXIT_OK } else { EXIT_FAIL })
}

fn parse_range(text: &str) -> Result<RangeInclusive<usize>, Failure> {
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| usage(format!("invalid range {text:?}")));
    let (a, b) = match text.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let v = parse(text)?;
            (v, v)
        }
    };
    if a > b {
        return Err(usage(format!("empty range {text:?}")));
    }
    Ok(a..=b)
}

fn measured_tree(n: usize, seed: u64) -> crate::tree::AmplitudeTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    build_tree(&random_state(&mut rng, n)).expect("random states are valid")
}

fn analyze(out: &mut dyn std::io::Write, range: RangeInclusive<usize>, measure: bool, seed: u64) -> CliResult {
    let hi = if measure { MAX_MEASURED_N } else { MAX_N };
    if *range.start() == 0 || *range.end() > hi {
        return Err(usage(format!("n must lie in 1..={hi}")));
    }
    let mut csv = String::from("n,qubits,cswaps,depth,depth_parallel,q_min,midreset_depth");
    if measure {
        csv.push_str(",measured_qubits,measured_cswaps,measured_depth,measured_depth_parallel");
    }
    csv.push('\n');
    for n in range {
        let f = dc_formulas(n).expect("n >= 1");
        let (q_min, mdepth) = match midreset_formulas(n) {
            Ok(m) => (m.q_min.to_string(), m.depth.to_string()),
            Err(_) => (String::new(), String::new()),
        };
        let _ = write!(csv, "{n},{},{},{},{},{q_min},{mdepth}", f.qubits, f.cswaps, f.depth, f.depth_parallel);
        if measure {
            let tree = measured_tree(n, seed);
            let plain = compile_dc(&tree, DcOptions::default()).map_err(|e| usage(e.to_string()))?;
            let par = compile_dc(&tree, DcOptions { parallelize: true, ..Default::default() })
                .map_err(|e| usage(e.to_string()))?;
            let m = metrics(&plain.circuit).map_err(|e| usage(e.to_string()))?;
            let mp = metrics(&par.circuit).map_err(|e| usage(e.to_string()))?;
            let _ = write!(csv, ",{},{},{},{}", m.qubits, m.unit_cswaps, m.depth_gates, mp.depth_gates);
        }
        csv.push('\n');
    }
    emit(out, &csv)?;
    Ok(EXIT_OK)
}

fn sweep(
    out: &mut dyn std::io::Write,
    n: usize,
    lambdas: RangeInclusive<usize>,
    measure: bool,
    seed: u64,
) -> CliResult {
    let hi = if measure { MAX_MEASURED_N } else { MAX_N };
    if n == 0 || n > hi {
        return Err(usage(format!("n must lie in 1..={hi}")));
    }
    if *lambdas.start() == 0 || *lambdas.end() > n {
        return Err(usage(format!("lambda must lie in 1..={n}")));
    }
    let mut csv = String::from("n,lambda,qubits,depth_gates");
    if measure {
        csv.push_str(",measured_qubits,measured_depth_gates,depth_full");
    }
    csv.push('\n');
    let tree = measure.then(|| measured_tree(n, seed));
    for lambda in lambdas {
        let f = hybrid_formulas(n, lambda).map_err(|e| usage(e.to_string()))?;
        let _ = write!(csv, "{n},{lambda},{},{}", f.qubits, f.depth);
        if let Some(tree) = &tree {
            let c = compile_hybrid(tree, lambda, DcOptions::default()).map_err(|e| usage(e.to_string()))?;
            let m = metrics(&c.circuit).map_err(|e| usage(e.to_string()))?;
            let _ = write!(csv, ",{},{},{}", m.qubits, m.depth_gates, m.depth_full);
        }
        csv.push('\n');
    }
    emit(out, &csv)?;
    Ok(EXIT_OK)
}

fn distinguish(out: &mut dyn std::io::Write, plus: &Path, minus: &Path, path: Option<&Path>) -> CliResult {
    let pair = OrthPair::new(load_complex(plus)?, load_complex(minus)?).map_err(|e| usage(e.to_string()))?;
    let plan = decompose(&pair);
    let p_plus = label_probability(&evaluate_plan(&plan, &pair.plus).expect("matching dimension"), Label::Plus);
    let p_minus = label_probability(&evaluate_plan(&plan, &pair.minus).expect("matching dimension"), Label::Minus);
    if let Some(path) = path {
        write(path, &(serde_json::to_string_pretty(&plan.to_json()).expect("serializable") + "\n"))?;
    }
    let pass = p_plus >= 1.0 - ORTHOGONALITY_TOL && p_minus >= 1.0 - ORTHOGONALITY_TOL;
    let report = json!({"p_correct_plus": p_plus, "p_correct_minus": p_minus, "pass": pass});
    emit(out, &(report.to_string() + "\n"))?;
    Ok(if pass { EXIT_OK } else { EXIT_FAIL })
}
