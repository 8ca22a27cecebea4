//! `loccode`: build codes, nest them, verify local procedures exactly, and
//! evaluate the parameter formulas.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input,
//! 3 enumeration budget exceeded.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "loccode", version, about = "Relaxed locally correctable codes by nesting")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Step budget for exact enumerations.
    #[arg(long, global = true, default_value_t = loccode::codes::DEFAULT_BUDGET)]
    pub budget: u64,
    /// TOML file with the asymptotic constants (all default to 1).
    #[arg(long, global = true)]
    pub constants: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to LOCCODE_THREADS, then the number of CPUs.
    #[arg(long, global = true, env = "LOCCODE_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Construct a code and write it as a .pchk file.
    Build(BuildArgs),
    /// Fold a chain descriptor into one nested code.
    Nest(NestArgs),
    /// Check completeness and soundness of a corrector, or testability of a tester.
    Verify(VerifyArgs),
    /// Measure the testability of a tester.
    Measure(MeasureArgs),
    /// Evaluate the parameter formulas.
    Params(ParamsArgs),
    /// Run a corrector on sampled corruptions and write one CSV row per trial.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[arg(value_enum)]
    pub family: Family,
    /// Block length (parity, ldpc).
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of check bits (hamming).
    #[arg(long)]
    pub r: Option<usize>,
    /// Check rows (ldpc).
    #[arg(long)]
    pub rows: Option<usize>,
    /// Ones per row (ldpc).
    #[arg(long)]
    pub row_weight: Option<usize>,
    /// Column factor (tensor): `parity<n>`, `hamming<r>`, or a .pchk path.
    #[arg(long)]
    pub a: Option<String>,
    /// Row factor (tensor), same forms as `--a`.
    #[arg(long)]
    pub b: Option<String>,
    /// Require the exact minimum distance; exits 3 if it exceeds the budget.
    #[arg(long)]
    pub distance: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Parity,
    Hamming,
    Ldpc,
    Tensor,
}

#[derive(Args, Debug)]
pub struct NestArgs {
    /// Chain descriptor (`LEVEL j code=… tester=… delta=… kappa=…`).
    pub descriptor: PathBuf,
}

/// Where the procedure under test comes from.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// A .pchk file: full-read corrector, or a tester with `--tester`.
    #[arg(long)]
    pub code: Option<PathBuf>,
    /// A chain descriptor: the iterated nested corrector.
    #[arg(long)]
    pub chain: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Procedure {
    /// The corrector the source defines.
    Corrector,
    /// A corrector that always answers ⊥ (negative control).
    Bottom,
    /// The tester selected by `--tester`.
    Tester,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_enum, default_value_t = Procedure::Corrector)]
    pub procedure: Procedure,
    /// Tester for `--procedure tester`: full, parity or tensor.
    #[arg(long, default_value = "parity")]
    pub tester: String,
    /// Minimum acceptable testability; by default any positive value passes.
    #[arg(long)]
    pub threshold: Option<String>,
    /// Soundness radius as a fraction; defaults to the corrector's declared radius.
    #[arg(long)]
    pub radius: Option<String>,
    /// Corruption model: exhaustive, uniform, burst or block:<len>.
    #[arg(long, default_value = "exhaustive")]
    pub model: String,
    /// Flips per corrupted word for random models; defaults to ⌊radius·n⌋.
    #[arg(long)]
    pub weight: Option<usize>,
    /// Words drawn by random models.
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Override the tester repetition count of the outermost nesting level.
    #[arg(long)]
    pub repetitions: Option<usize>,
    /// Allow Monte Carlo estimation when exact enumeration exceeds the budget.
    #[arg(long)]
    pub mc: bool,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct MeasureArgs {
    #[arg(long)]
    pub code: PathBuf,
    /// full, parity or tensor.
    #[arg(long, default_value = "parity")]
    pub tester: String,
    /// Sample words instead of enumerating all of them.
    #[arg(long)]
    pub mc: bool,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false, id = "calculator")]
pub struct Calculator {
    /// Testable-code family parameters for rate 1 − ε.
    #[arg(long, value_name = "EPS")]
    pub dellm: Option<String>,
    /// Polylogarithmic family for target length N (decimal or `2^k`).
    #[arg(long, value_name = "N")]
    pub family: Option<String>,
    /// Headline query, rate and radius formulas at length N.
    #[arg(long, value_name = "N")]
    pub headline: Option<String>,
    /// `1 − R − H(δ)`.
    #[arg(long, num_args = 2, value_names = ["R", "DELTA"])]
    pub gv: Option<Vec<String>>,
}

#[derive(Args, Debug)]
pub struct ParamsArgs {
    #[command(flatten)]
    pub calculator: Calculator,
    /// Block lengths to list for `--dellm`.
    #[arg(long, default_value_t = 3)]
    pub levels: u32,
    /// Tester queries `q` for `--headline`.
    #[arg(long, default_value = "1")]
    pub q: String,
    /// Testability `κ` for `--headline`.
    #[arg(long, default_value = "1")]
    pub kappa: String,
    /// Final-code rate `R` for `--headline`.
    #[arg(long, default_value = "1")]
    pub rate: String,
    /// `ε` for the explicit instantiation in `--headline`.
    #[arg(long, default_value = "1/2")]
    pub eps: String,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: Source,
    /// uniform, burst or block:<len>.
    #[arg(long, default_value = "uniform")]
    pub model: String,
    #[arg(long, default_value_t = 0)]
    pub weight: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long)]
    pub repetitions: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let threads = cli.global.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start {threads} threads: {e}");
            return ExitCode::from(2);
        }
    };
    let result = pool.install(|| match &cli.command {
        Command::Build(a) => commands::build(&cli.global, a),
        Command::Nest(a) => commands::nest(&cli.global, a),
        Command::Verify(a) => commands::verify(&cli.global, a),
        Command::Measure(a) => commands::measure(&cli.global, a),
        Command::Params(a) => commands::params(&cli.global, a),
        Command::Simulate(a) => commands::simulate(&cli.global, a),
    });
    match result {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_budget() { 3 } else { 2 })
        }
    }
}
