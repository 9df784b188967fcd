//! `attractor-lab`: command-line front end to the attractor library.
//!
//! Exit codes: 0 on success, 1 when a validation fails, 2 when a precision or
//! depth budget runs out, 64 on usage errors.

mod commands;

use attractor_lab::arithmetic::{Generator, QuadSurd, RotationNumber, DEFAULT_BITS};
use attractor_lab::Error;
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

const DEFAULT_DEPTH: usize = 25;
const DEFAULT_GRID: usize = 4096;

#[derive(Parser, Debug)]
#[command(name = "attractor-lab", version, about = "Model attractors of irrationally indifferent maps")]
struct Cli {
    /// Worker threads for the data-parallel kernels (default: all cores).
    #[arg(long, global = true, env = "ATTRACTOR_LAB_THREADS", value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Nearest-integer expansion: digits, alpha_n, beta_n, certified depth.
    Expand(ExpandArgs),
    /// Modified and standard Brjuno partial sums with their alignment.
    Brjuno(BrjunoArgs),
    /// Arithmetic class with the full decision transcript.
    Classify(ClassifyArgs),
    /// Geometry CSV, image and metadata sidecar.
    Render(RenderArgs),
    /// Orbit of a point under the model map, with recurrence gaps.
    Orbit(OrbitArgs),
    /// Compare the renormalised map with the model map of -1/alpha.
    RenormVerify(RenormArgs),
    /// Run the acceptance suite.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug, Clone)]
#[command(group(ArgGroup::new("alpha").required(true).args(["alpha_surd", "alpha_dec", "alpha_gen"])))]
struct AlphaArgs {
    /// Quadratic surd `(p + q sqrt d)/r` as "p,q,d,r".
    #[arg(long, allow_hyphen_values = true)]
    alpha_surd: Option<String>,
    /// Decimal literal, trusted to --prec-bits relative bits.
    #[arg(long, allow_hyphen_values = true)]
    alpha_dec: Option<String>,
    /// Named generator: golden, sqrt2, tower-nonbrjuno[,a0=N], std-tower-BnotH.
    #[arg(long)]
    alpha_gen: Option<String>,
    /// Working precision in bits.
    #[arg(long, default_value_t = DEFAULT_BITS, value_parser = positive)]
    prec_bits: usize,
}

impl AlphaArgs {
    fn rotation_number(&self) -> Result<RotationNumber, Failure> {
        let usage = |e: Error| Failure::Usage(e.to_string());
        let alpha = match (&self.alpha_surd, &self.alpha_dec, &self.alpha_gen) {
            (Some(s), None, None) => RotationNumber::surd(QuadSurd::parse(s).map_err(usage)?),
            (None, Some(d), None) => RotationNumber::decimal(d, self.prec_bits).map_err(usage)?,
            (None, None, Some(g)) => RotationNumber::generator(Generator::parse(g).map_err(usage)?),
            _ => return Err(Failure::Usage("exactly one alpha source is required".into())),
        };
        Ok(alpha.with_bits(self.prec_bits))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct ExpandArgs {
    #[command(flatten)]
    alpha: AlphaArgs,
    #[arg(long, default_value_t = DEFAULT_DEPTH, value_parser = positive)]
    depth: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct BrjunoArgs {
    #[command(flatten)]
    alpha: AlphaArgs,
    #[arg(long, default_value_t = DEFAULT_DEPTH, value_parser = positive)]
    depth: usize,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    alpha: AlphaArgs,
    /// Levels examined.
    #[arg(long, default_value_t = 64, value_parser = positive)]
    depth: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ImageFormat {
    Ppm,
    Svg,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Filled,
    Attractor,
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[command(flatten)]
    alpha: AlphaArgs,
    #[arg(long, default_value_t = DEFAULT_DEPTH, value_parser = positive)]
    depth: usize,
    /// Number of angles.
    #[arg(long = "K", default_value_t = DEFAULT_GRID, value_parser = positive)]
    k: usize,
    /// Profile samples per unit.
    #[arg(long = "M", default_value_t = DEFAULT_GRID, value_parser = positive)]
    m: usize,
    /// Render the member of the invariant family with outer radius `t` at +1.
    #[arg(long)]
    invariant_t: Option<f64>,
    /// Output path without extension; `.csv`, `.json` and the image are
    /// written next to each other.
    #[arg(long, short, default_value = "attractor")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = ImageFormat::Ppm)]
    image: ImageFormat,
    #[arg(long, value_enum, default_value_t = Mode::Filled)]
    mode: Mode,
    #[arg(long, default_value_t = 1024, value_parser = positive)]
    width: usize,
    #[arg(long, default_value_t = 1024, value_parser = positive)]
    height: usize,
}

#[derive(Args, Debug)]
struct OrbitArgs {
    #[command(flatten)]
    alpha: AlphaArgs,
    /// Argument of the starting point.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta: f64,
    /// Modulus of the starting point.
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long, short = 'n', default_value_t = 1000, value_parser = positive)]
    iterations: usize,
    /// Deepest level a single step may climb.
    #[arg(long, default_value_t = DEFAULT_DEPTH, value_parser = positive)]
    depth: usize,
    /// CSV destination; stdout by default.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RenormArgs {
    #[command(flatten)]
    alpha: AlphaArgs,
    #[arg(long, default_value_t = DEFAULT_DEPTH, value_parser = positive)]
    depth: usize,
    #[arg(long, default_value_t = 64, value_parser = positive)]
    samples: usize,
    /// Largest admissible deviation; `10 * 0.9^depth` by default.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "M", default_value_t = DEFAULT_GRID, value_parser = positive)]
    m: usize,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    /// Run only these criteria.
    #[arg(long, value_delimiter = ',')]
    only: Vec<u32>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Validation(String),
    Budget(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Budget(_) => 2,
            Failure::Usage(_) => 64,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Validation(m) | Failure::Budget(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) => Failure::Usage(e.to_string()),
            Error::BudgetExceeded(_)
            | Error::PrecisionExhausted { .. }
            | Error::DepthExceeded { .. }
            | Error::NonConvergence(_) => Failure::Budget(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Validation(format!("i/o error: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Validation(format!("json error: {e}"))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.into())
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot set up {n} threads: {e}")))?;
    }
    match cli.command {
        Command::Expand(a) => commands::expand(&a.alpha.rotation_number()?, a.depth, a.format == Format::Json),
        Command::Brjuno(a) => commands::brjuno(&a.alpha.rotation_number()?, a.depth),
        Command::Classify(a) => commands::classify(&a.alpha.rotation_number()?, a.depth),
        Command::Render(a) => commands::render(&a.alpha.rotation_number()?, &a),
        Command::Orbit(a) => commands::orbit(&a.alpha.rotation_number()?, &a),
        Command::RenormVerify(a) => commands::renorm_verify(&a.alpha.rotation_number()?, &a),
        Command::Selftest(a) => commands::selftest(&a.only, a.format == Format::Json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
