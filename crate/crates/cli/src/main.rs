use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gelfand_core::io::{self, FormatError};
use gelfand_core::maps::classify_map;
use gelfand_core::monads::enumerate_miu_states;
use gelfand_core::states::{dirac_state, is_extreme};
use gelfand_core::tol::{CLASSIFY_TOL, DEFAULT_POSITIVITY_SAMPLES};
use gelfand_core::verify::{verify_equivalence, verify_monad_laws, verify_transpose_witness};
use gelfand_core::{
    from_pu, function_to_miu, kleisli_compose, miu_to_function, to_pu, verify_triangle, AlgebraSignature, Error,
    KleisliMap,
};
use serde::Serialize;

/// Largest `n` for which MIU states are enumerated exhaustively.
const MAX_ENUMERATED_N: usize = 8;

/// Sampled projections per block in the transpose witness.
const WITNESS_SAMPLES: usize = 1000;

#[derive(Parser)]
#[command(name = "gelfand", version, about = "Finite-dimensional C*-algebra semantics toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert between stochastic matrices, PU maps, functions and MIU maps.
    Convert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        direction: Direction,
    },
    /// Weakest precondition of an effect along a stochastic matrix.
    Wp {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        predicate: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolve a distribution along a square stochastic matrix.
    Evolve {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded verifier and emit its JSON report.
    Verify {
        target: Target,
        /// Comma-separated block sizes.
        #[arg(long, value_delimiter = ',', default_values_t = [1, 1])]
        blocks: Vec<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The extreme states of C^n.
    Extremes {
        #[arg(long)]
        n: usize,
        /// Also count MIU states by enumerating all Boolean functionals.
        #[arg(long)]
        enumerate_miu: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a linear map as unital, involutive, multiplicative, positive, CP.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_POSITIVITY_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    KleisliToPu,
    PuToKleisli,
    FnToMiu,
    MiuToFn,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Triangle,
    Equivalence,
    MonadLaws,
    TransposeWitness,
}

enum Failure {
    Parse(String),
    Precondition(String),
    /// The report was emitted but some check failed.
    Verification,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification => 1,
            Failure::Parse(_) => 2,
            Failure::Precondition(_) => 3,
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Invalid(inner) => Failure::Precondition(inner.to_string()),
            other => Failure::Parse(other.to_string()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Precondition(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

/// Reporting tolerance, overridable through `GELFAND_TOL`.
fn reporting_tol() -> Result<f64, Failure> {
    match std::env::var("GELFAND_TOL") {
        Err(_) => Ok(CLASSIFY_TOL),
        Ok(raw) => match raw.trim().parse::<f64>() {
            Ok(t) if t.is_finite() && t >= 0.0 => Ok(t),
            _ => Err(Failure::Parse(format!("GELFAND_TOL must be a non-negative number, got {raw:?}"))),
        },
    }
}

fn write_out(out: Option<&Path>, text: &str) -> CmdResult {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Precondition(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialise")
}

#[derive(Serialize)]
struct ConvertReport {
    direction: &'static str,
    residual: f64,
    tolerance: f64,
    pass: bool,
}

fn convert(input: &Path, out: &Path, direction: Direction) -> CmdResult {
    let tol = reporting_tol()?;
    let text = io::read_file(input)?;
    let (name, body, residual) = match direction {
        Direction::KleisliToPu => {
            let k = io::parse_kernel_csv(&text)?;
            let h = to_pu(&k);
            ("kleisli-to-pu", io::map_to_json(&h), from_pu(&h)?.max_distance(&k)?)
        }
        Direction::PuToKleisli => {
            let h = io::parse_map(&text)?;
            let k = from_pu(&h)?;
            ("pu-to-kleisli", io::kernel_to_csv(&k), to_pu(&k).distance(&h)?)
        }
        Direction::FnToMiu => {
            let f = io::parse_function(&text)?;
            let h = function_to_miu(&f)?;
            let back = miu_to_function(&h)?;
            ("fn-to-miu", io::map_to_json(&h), if back == f { 0.0 } else { 1.0 })
        }
        Direction::MiuToFn => {
            let h = io::parse_map(&text)?;
            let f = miu_to_function(&h)?;
            ("miu-to-fn", io::function_to_json(&f), function_to_miu(&f)?.distance(&h)?)
        }
    };
    write_out(Some(out), &body)?;
    let report = ConvertReport { direction: name, residual, tolerance: tol, pass: residual <= tol };
    let mut sidecar = out.as_os_str().to_owned();
    sidecar.push(".report.json");
    write_out(Some(Path::new(&sidecar)), &to_json(&report))?;
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn wp(kernel: &Path, predicate: &Path, out: Option<&Path>) -> CmdResult {
    let k = io::parse_kernel_csv(&io::read_file(kernel)?)?;
    let e = io::parse_effect(&io::read_file(predicate)?)?;
    let pre = to_pu(&k).apply(e.element())?;
    let pre = gelfand_core::Effect::new(pre)?;
    write_out(out, &io::element_to_json(pre.element()))
}

fn evolve(kernel: &Path, dist: &Path, steps: usize, out: Option<&Path>) -> CmdResult {
    let k = io::parse_kernel_csv(&io::read_file(kernel)?)?;
    let d = io::parse_dist(&io::read_file(dist)?)?;
    if k.dom_size() != k.cod_size() {
        return Err(Error::ShapeMismatch(format!("kernel is {}x{}, not square", k.dom_size(), k.cod_size())).into());
    }
    if d.len() != k.dom_size() {
        return Err(
            Error::SizeMismatch(format!("distribution on {} points, kernel on {}", d.len(), k.dom_size())).into()
        );
    }
    // d·Mᵏ as the Kleisli composite of a point with k copies of M
    let mut path = KleisliMap::from_rows(d.len(), std::slice::from_ref(&d))?;
    for _ in 0..steps {
        path = kleisli_compose(&k, &path)?;
    }
    write_out(out, &io::dist_to_json(&path.row(0)))
}

#[allow(clippy::too_many_arguments)]
fn verify(
    target: Target,
    blocks: Vec<usize>,
    n: Option<usize>,
    m: Option<usize>,
    trials: usize,
    seed: u64,
    out: Option<&Path>,
) -> CmdResult {
    let tol = reporting_tol()?;
    let (json, passed) = match target {
        Target::Triangle => {
            let sig = AlgebraSignature::new(blocks)?;
            let rep = verify_triangle(&sig, trials, seed)?;
            (to_json(&rep), rep.passed())
        }
        Target::Equivalence => {
            let rep = verify_equivalence(n.unwrap_or(3), m.unwrap_or(3), trials, seed, tol)?;
            (to_json(&rep), rep.passed())
        }
        Target::MonadLaws => {
            let rep = verify_monad_laws(n.unwrap_or(3), trials, seed)?;
            (to_json(&rep), rep.passed())
        }
        Target::TransposeWitness => {
            let rep = verify_transpose_witness(n.unwrap_or(2), WITNESS_SAMPLES, trials, seed, tol)?;
            (to_json(&rep), rep.passed())
        }
    };
    write_out(out, &json)?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn extremes(n: usize, enumerate_miu: bool, out: Option<&Path>) -> CmdResult {
    if n == 0 {
        return Err(Error::InvalidDimension("n must be at least 1".into()).into());
    }
    if enumerate_miu && n > MAX_ENUMERATED_N {
        return Err(Error::DimensionTooLarge { dim: n, max: MAX_ENUMERATED_N }.into());
    }
    let states = (0..n).map(|i| dirac_state(i, n)).collect::<Result<Vec<_>, _>>()?;
    let all_extreme = states.iter().all(is_extreme);
    let miu = if enumerate_miu { Some(enumerate_miu_states(n)?.len()) } else { None };
    write_out(out, &io::states_to_json(&states))?;
    match miu {
        Some(count) => eprintln!("{n} Dirac states, all extreme: {all_extreme}; MIU states: {count}"),
        None => eprintln!("{n} Dirac states, all extreme: {all_extreme}"),
    }
    if all_extreme && miu.is_none_or(|c| c == n) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn classify(input: &Path, samples: usize, seed: u64, out: Option<&Path>) -> CmdResult {
    let f = io::parse_map(&io::read_file(input)?)?;
    write_out(out, &to_json(&classify_map(&f, samples, seed)))
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Convert { input, out, direction } => convert(&input, &out, direction),
        Command::Wp { kernel, predicate, out } => wp(&kernel, &predicate, out.as_deref()),
        Command::Evolve { kernel, dist, steps, out } => evolve(&kernel, &dist, steps, out.as_deref()),
        Command::Verify { target, blocks, n, m, trials, seed, out } => {
            verify(target, blocks, n, m, trials, seed, out.as_deref())
        }
        Command::Extremes { n, enumerate_miu, out } => extremes(n, enumerate_miu, out.as_deref()),
        Command::Classify { input, samples, seed, out } => classify(&input, samples, seed, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Parse(msg) => eprintln!("error: parse: {msg}"),
                Failure::Precondition(msg) => eprintln!("error: {msg}"),
                Failure::Verification => eprintln!("verification failed"),
            }
            ExitCode::from(failure.code())
        }
    }
}
