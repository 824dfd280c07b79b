mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Weighted Littlewood–Paley spaces and Klein–Gordon Picard solver.
///
/// Every verb accepts `--config FILE` holding `key = value` lines named after
/// its long flags; flags on the command line take precedence.
#[derive(Parser, Debug)]
#[command(name = "okg", version)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Solve the scaled equation by Picard iteration.
    Solve(SolveArgs),
    /// Evaluate a Besov, Triebel–Lizorkin, Bessel or E norm of a lattice file.
    Norm(NormArgs),
    /// Fit the sup-norm decay of a frequency-localized kernel.
    DecayScan(DecayArgs),
    /// Windowed Strichartz ratio of a Gaussian packet or a spectrum file.
    StrichartzSample(StrichartzArgs),
    /// Strichartz exponents for (d, p, θ).
    Exponents(ExponentArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Write one of the data families to a lattice file.
    GenData(GenDataArgs),
}

/// Real number that also accepts a `pi` suffix, as in `16pi`.
pub(crate) fn parse_real(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let (num, factor) = match t.strip_suffix("pi").or_else(|| t.strip_suffix('π')) {
        Some("") => return Ok(std::f64::consts::PI),
        Some(head) => (head.trim_end_matches('*'), std::f64::consts::PI),
        None => (t, 1.0),
    };
    num.parse::<f64>()
        .map(|v| v * factor)
        .map_err(|_| format!("not a number: {s:?}"))
}

#[derive(Args, Debug, Serialize)]
struct DataArgs {
    /// Spatial dimension.
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Points per axis (power of two).
    #[arg(long, default_value_t = 256)]
    n: usize,
    /// Box length; accepts a `pi` suffix.
    #[arg(long = "L", default_value = "16pi", value_parser = parse_real)]
    length: f64,
    /// `gaussian`, `sp`, `sp-series`, `concentrating`, or `file:PATH`.
    #[arg(long, default_value = "gaussian")]
    data: String,
    /// Gaussian center in frequency, comma separated (one value is repeated).
    #[arg(long, default_value = "1")]
    center: String,
    #[arg(long, default_value_t = 0.125)]
    width: f64,
    #[arg(long, default_value_t = 1e-2)]
    amplitude: f64,
    /// Order `k` of the Sokhotski–Plemelj profile or radius `1/k` of the
    /// concentrating family.
    #[arg(long, default_value_t = 8)]
    k: u32,
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    #[arg(long, default_value_t = 0.3)]
    series_rate: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum NonlinearityArg {
    Power,
    Sinh,
    Sin,
    ExpSquare,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ScalingArg {
    /// Unit coefficient for powers, `λ²` for the series kinds.
    Auto,
    Unit,
    MassSquared,
}

#[derive(Args, Debug, Serialize)]
struct SolveArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum, default_value = "power")]
    nonlinearity: NonlinearityArg,
    #[arg(long, default_value_t = 2)]
    alpha: u32,
    /// Sign in front of the nonlinearity: 1, -1 or 0.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    sign: f64,
    #[arg(long, default_value_t = 3)]
    taylor_terms: usize,
    /// Scaling parameter; a power of two.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Pick the smallest λ whose scaled data norm is at most `--delta`.
    #[arg(long, conflicts_with = "lambda")]
    auto_lambda: bool,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Monitoring norm E^{σ,s}.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    sigma: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    s: f64,
    /// Horizon in scaled time.
    #[arg(long = "T", default_value_t = 1.0)]
    horizon: f64,
    #[arg(long, default_value_t = 64)]
    nt: usize,
    #[arg(long, value_enum, default_value = "auto")]
    scaling: ScalingArg,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    /// Override of the alias-free band limit.
    #[arg(long)]
    band: Option<usize>,
    /// Write the solution in unscaled variables.
    #[arg(long)]
    map_back: bool,
    /// Series file.
    #[arg(long)]
    out: PathBuf,
    /// JSON report.
    #[arg(long)]
    report: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum NormKind {
    Besov,
    Triebel,
    Bessel,
    E,
}

#[derive(Args, Debug, Serialize)]
struct NormArgs {
    /// Field or spectrum file.
    #[arg(long)]
    input: PathBuf,
    /// `σ,s,p,q`; p and q accept `inf`.
    #[arg(long, allow_hyphen_values = true)]
    spec: String,
    #[arg(long, value_enum, default_value = "besov")]
    kind: NormKind,
    /// `all`, `zlambda:λ` or `zlambda-c:λ` (Besov only).
    #[arg(long, default_value = "all")]
    set: String,
    /// CSV with one row.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct DecayArgs {
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 0)]
    j: usize,
    #[arg(long, default_value_t = 4.0)]
    t_min: f64,
    #[arg(long, default_value_t = 64.0)]
    t_max: f64,
    /// Number of log-spaced times.
    #[arg(long, default_value_t = 9)]
    times: usize,
    /// Fine torus length; chosen from `t_max` when absent.
    #[arg(long = "L", value_parser = parse_real)]
    length: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    /// CSV: d, lambda, j, regime, t, sup_norm.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct StrichartzArgs {
    #[arg(long, default_value_t = 512)]
    n: usize,
    #[arg(long = "L", default_value = "160", value_parser = parse_real)]
    length: f64,
    /// Spectrum file; a Gaussian packet otherwise.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    center: f64,
    #[arg(long, default_value_t = 0.25)]
    width: f64,
    #[arg(long, default_value_t = 4.0)]
    lambda: f64,
    #[arg(long, default_value = "6")]
    p: String,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    sigma: f64,
    #[arg(long, default_value_t = -0.2, allow_negative_numbers = true)]
    s: f64,
    #[arg(long = "T", default_value_t = 32.0)]
    horizon: f64,
    #[arg(long, default_value_t = 64)]
    nt: usize,
    /// `zlambda`, `zlambda-c` or `all`.
    #[arg(long, default_value = "zlambda")]
    set: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct ExponentArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    p: String,
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    /// Also report the exponent used by the existence theorem for `u^{1+α}`.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    /// Suite id; repeat for several. All suites when absent.
    #[arg(long)]
    suite: Vec<String>,
    #[arg(long, default_value = "small")]
    tier: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    report: PathBuf,
    /// CSV of every measured constant.
    #[arg(long)]
    constants: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct GenDataArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Used by the Sokhotski–Plemelj tail estimate.
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    s: f64,
    /// Write samples instead of coefficients.
    #[arg(long)]
    physical: bool,
    #[arg(long)]
    out: PathBuf,
}

fn init_threads() {
    if let Some(n) = std::env::var("OKG_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            // Fails only if a pool already exists.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let argv = match config::merge_args(&Cli::command(), std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_threads();
    match commands::run(cli.verb) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
