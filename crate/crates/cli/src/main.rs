//! `oujump` — simulate the jump Ornstein-Uhlenbeck process, evaluate its
//! transition density, fit parameters by maximum likelihood and run the
//! Monte-Carlo experiment harness.
//!
//! Exit codes: 0 success, 1 usage/validation, 2 I/O, 3 internal or
//! replication failure. All randomness is seeded; identical invocations
//! produce byte-identical artifacts (set `SOURCE_DATE_EPOCH` to pin the
//! report timestamp).

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};
use serde::Serialize;

use oujump::io::{fmt_f64, read_path_csv, to_json_string, write_jumps_csv, write_path_csv};
use oujump::{
    fit_mle, run_efficiency, run_ergodic, run_lan, FitConfig, InitStrategy, JTruncation,
    LanExperimentConfig, LocalAlternative, Mixture, MixtureConfig, ModelParams, RngStream,
    SamplingScheme, TestFunction, RNG_ALGORITHM,
};

mod kvfile;

use kvfile::KvConfig;

#[derive(Parser)]
#[command(name = "oujump", version, about)]
struct Cli {
    /// Flat `key = value` config file; explicit flags override its values
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Cap the worker thread count
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a path and write it as `t,x` CSV
    Simulate(SimulateArgs),
    /// Evaluate the transition density (optionally gradient and posterior)
    Density(DensityArgs),
    /// Fit parameters to an observed path by maximum likelihood
    Fit(FitArgs),
    /// Monte-Carlo check of the log-likelihood-ratio limit
    Lan(LanArgs),
    /// Monte-Carlo check of MLE efficiency against the inverse Fisher matrix
    Efficiency(EfficiencyArgs),
    /// Long-run ergodic average of a named test function
    Ergodic(ErgodicArgs),
}

#[derive(clap::Args)]
struct SimulateArgs {
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    x0: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Stream id within the seed (defaults to 0)
    #[arg(long)]
    stream: Option<u64>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Also write the latent jump times as `k,s` CSV
    #[arg(long, value_name = "PATH")]
    jumps_out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct DensityArgs {
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    x: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    y: Option<f64>,
    /// Include the gradient of log p in (theta, sigma, lambda)
    #[arg(long)]
    grad: bool,
    /// Include the jump-count posterior
    #[arg(long)]
    posterior: bool,
    /// Fixed mixture truncation (default: automatic)
    #[arg(long)]
    jmax: Option<usize>,
}

#[derive(clap::Args)]
struct FitArgs {
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Starting point `theta,sigma,lambda` (default: method of moments)
    #[arg(long, allow_hyphen_values = true)]
    init: Option<String>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct LanArgs {
    #[arg(long, allow_negative_numbers = true)]
    theta0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sigma0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda0: Option<f64>,
    #[arg(short, long, allow_negative_numbers = true)]
    u: Option<f64>,
    #[arg(short, long, allow_negative_numbers = true)]
    v: Option<f64>,
    #[arg(short, long, allow_negative_numbers = true)]
    w: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Step-size rule `n^-q` evaluated at the given n (alternative to --delta)
    #[arg(long, value_name = "RULE")]
    delta_rule: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    x0: Option<f64>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Dump the raw log-likelihood-ratio sample as `rep,loglr` CSV
    #[arg(long, value_name = "PATH")]
    raw_csv: Option<PathBuf>,
}

#[derive(clap::Args)]
struct EfficiencyArgs {
    #[arg(long, allow_negative_numbers = true)]
    theta0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sigma0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda0: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long, value_name = "RULE")]
    delta_rule: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    x0: Option<f64>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ErgodicArgs {
    #[arg(long, allow_negative_numbers = true)]
    theta0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sigma0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda0: Option<f64>,
    /// Test function: identity, square, abs or cube
    #[arg(long)]
    g: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long, value_name = "RULE")]
    delta_rule: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    x0: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Io(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Internal(m) => m,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn from_core(err: oujump::Error) -> CliError {
    use oujump::Error as E;
    match &err {
        E::InvalidValue { .. } | E::OffsetOutOfRange { .. } | E::UnknownTestFunction(_) => {
            CliError::Usage(err.to_string())
        }
        E::DegeneratePath => CliError::Usage(err.to_string()),
        E::Csv { .. } | E::Io(_) => CliError::Io(err.to_string()),
        E::Replication { .. } | E::TooManyFailures { .. } | E::NonFiniteTerm { .. } => {
            CliError::Internal(err.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Usage("`--threads` must be >= 1".into()));
        }
        // ignore failure when a pool already exists (e.g. under tests)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let kv = match &cli.config {
        Some(path) => KvConfig::load(path)?,
        None => KvConfig::default(),
    };
    match cli.command {
        Command::Simulate(args) => cmd_simulate(args, &kv),
        Command::Density(args) => cmd_density(args, &kv),
        Command::Fit(args) => cmd_fit(args, &kv),
        Command::Lan(args) => cmd_lan(args, &kv),
        Command::Efficiency(args) => cmd_efficiency(args, &kv),
        Command::Ergodic(args) => cmd_ergodic(args, &kv),
    }
}

/// Take the flag value, else the config-file value, else fail with a usage
/// message that names the flag and shows the subcommand usage line.
fn require<T: Clone + std::str::FromStr>(
    flag_value: &Option<T>,
    kv: &KvConfig,
    key: &str,
    subcommand: &str,
) -> CliResult<T> {
    if let Some(v) = flag_value {
        return Ok(v.clone());
    }
    if let Some(parsed) = kv.get::<T>(key)? {
        return Ok(parsed);
    }
    Err(CliError::Usage(format!(
        "missing required flag `--{key}`\n{}",
        usage_for(subcommand)
    )))
}

fn optional<T: Clone + std::str::FromStr>(
    flag_value: &Option<T>,
    kv: &KvConfig,
    key: &str,
) -> CliResult<Option<T>> {
    if let Some(v) = flag_value {
        return Ok(Some(v.clone()));
    }
    kv.get::<T>(key)
}

fn usage_for(subcommand: &str) -> String {
    let mut root = Cli::command();
    let sub = root
        .find_subcommand_mut(subcommand)
        .expect("known subcommand");
    format!("usage: {}", sub.render_usage())
}

fn params_from(theta: f64, sigma: f64, lambda: f64) -> CliResult<ModelParams> {
    ModelParams::new(theta, sigma, lambda).map_err(from_core)
}

/// Resolve `--delta` / `--delta-rule n^-q` (exactly one must be given).
fn resolve_delta(
    delta: Option<f64>,
    rule: &Option<String>,
    n: usize,
    subcommand: &str,
) -> CliResult<(f64, Option<String>)> {
    match (delta, rule) {
        (Some(d), None) => Ok((d, None)),
        (None, Some(r)) => {
            let q = parse_delta_rule(r)?;
            Ok(((n as f64).powf(q), Some(r.clone())))
        }
        (Some(_), Some(_)) => Err(CliError::Usage(
            "`--delta` and `--delta-rule` are mutually exclusive".into(),
        )),
        (None, None) => Err(CliError::Usage(format!(
            "missing required flag `--delta` (or `--delta-rule`)\n{}",
            usage_for(subcommand)
        ))),
    }
}

/// Parse the single supported rule form `n^-q` with `q` rational
/// (decimal like `0.6` or fraction like `3/5`).
fn parse_delta_rule(rule: &str) -> CliResult<f64> {
    let bad = || {
        CliError::Usage(format!(
            "invalid `--delta-rule` value `{rule}` (expected the form n^-q)"
        ))
    };
    let rest = rule.strip_prefix("n^").ok_or_else(bad)?;
    let q: f64 = if let Some((num, den)) = rest.split_once('/') {
        let n: f64 = num.trim().parse().map_err(|_| bad())?;
        let d: f64 = den.trim().parse().map_err(|_| bad())?;
        n / d
    } else {
        rest.trim().parse().map_err(|_| bad())?
    };
    if !(q.is_finite() && q < 0.0) {
        return Err(bad());
    }
    Ok(q)
}

fn create_file(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("cannot write `{}`: {e}", path.display())))
}

/// ISO-8601 timestamp; `SOURCE_DATE_EPOCH` pins it for reproducible runs.
fn timestamp() -> String {
    use chrono::{SecondsFormat, TimeZone, Utc};
    let now = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.parse::<i64>().ok())
        .and_then(|secs| Utc.timestamp_opt(secs, 0).single())
        .unwrap_or_else(chrono::Utc::now);
    now.to_rfc3339_opts(SecondsFormat::Secs, true)
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    generated_at: String,
    /// Step size actually used (echoes the resolved `--delta-rule`).
    resolved_delta: f64,
    delta_rule: Option<String>,
    #[serde(flatten)]
    report: T,
}

fn emit_report<T: Serialize>(
    report: &T,
    resolved_delta: f64,
    delta_rule: Option<String>,
    out: &Option<PathBuf>,
) -> CliResult<String> {
    let doc = Envelope {
        generated_at: timestamp(),
        resolved_delta,
        delta_rule,
        report,
    };
    let json = to_json_string(&doc).map_err(from_core)?;
    if let Some(path) = out {
        let mut w = create_file(path)?;
        writeln!(w, "{json}").map_err(|e| CliError::Io(e.to_string()))?;
    } else {
        println!("{json}");
    }
    Ok(json)
}

fn cmd_simulate(args: SimulateArgs, kv: &KvConfig) -> CliResult<()> {
    let theta = require(&args.theta, kv, "theta", "simulate")?;
    let sigma = require(&args.sigma, kv, "sigma", "simulate")?;
    let lambda = require(&args.lambda, kv, "lambda", "simulate")?;
    let n = require(&args.n, kv, "n", "simulate")?;
    let delta = require(&args.delta, kv, "delta", "simulate")?;
    let x0 = require(&args.x0, kv, "x0", "simulate")?;
    let seed = require(&args.seed, kv, "seed", "simulate")?;
    let stream = optional(&args.stream, kv, "stream")?.unwrap_or(0);
    let out = match &args.out {
        Some(p) => p.clone(),
        None => require::<PathBuf>(&None, kv, "out", "simulate")?,
    };

    let params = params_from(theta, sigma, lambda)?;
    let scheme = SamplingScheme::new(n, delta, x0).map_err(from_core)?;
    let keep_latent = args.jumps_out.is_some();
    let path = oujump::simulate_path(params, scheme, RngStream::new(seed, stream), keep_latent)
        .map_err(from_core)?;

    let mut w = create_file(&out)?;
    write_path_csv(&path, &mut w).map_err(from_core)?;
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    if let Some(jumps_path) = &args.jumps_out {
        let mut w = create_file(jumps_path)?;
        write_jumps_csv(&path, &mut w).map_err(from_core)?;
        w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    }
    println!(
        "simulated n={} steps, lambda*delta={}, rng={} seed={} stream={}",
        n,
        fmt_f64(lambda * delta),
        RNG_ALGORITHM,
        seed,
        stream
    );
    Ok(())
}

#[derive(Serialize)]
struct DensityOutput {
    p: f64,
    logp: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    grad: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    posterior: Option<Vec<f64>>,
    j_max: usize,
}

fn cmd_density(args: DensityArgs, kv: &KvConfig) -> CliResult<()> {
    let theta = require(&args.theta, kv, "theta", "density")?;
    let sigma = require(&args.sigma, kv, "sigma", "density")?;
    let lambda = require(&args.lambda, kv, "lambda", "density")?;
    let delta = require(&args.delta, kv, "delta", "density")?;
    let x = require(&args.x, kv, "x", "density")?;
    let y = require(&args.y, kv, "y", "density")?;
    let jmax = optional(&args.jmax, kv, "jmax")?;

    let params = params_from(theta, sigma, lambda)?;
    let config = match jmax {
        Some(j) => MixtureConfig::new(
            JTruncation::Fixed(j),
            MixtureConfig::default().tail_epsilon(),
            MixtureConfig::default().quadrature_order(),
            MixtureConfig::default().mc_nodes(),
        )
        .map_err(from_core)?,
        None => MixtureConfig::default(),
    };
    let mix = Mixture::new(params, delta, config).map_err(from_core)?;
    if mix.capped() {
        eprintln!(
            "warning: mixture truncation capped at {} terms",
            oujump::J_CAP
        );
    }
    let (logp, grad) = mix.log_density_grad(x, y);
    let output = DensityOutput {
        p: logp.exp(),
        logp,
        grad: args.grad.then_some(grad),
        posterior: args
            .posterior
            .then(|| mix.posterior(x, y).probabilities().to_vec()),
        j_max: mix.j_max(),
    };
    println!("{}", to_json_string(&output).map_err(from_core)?);
    Ok(())
}

fn cmd_fit(args: FitArgs, kv: &KvConfig) -> CliResult<()> {
    let input = require(&args.input, kv, "input", "fit")?;
    let delta = require(&args.delta, kv, "delta", "fit")?;
    let init = optional(&args.init, kv, "init")?;
    let max_iter = optional(&args.max_iter, kv, "max-iter")?;
    let tol = optional(&args.tol, kv, "tol")?;

    let init = match init {
        None => InitStrategy::Auto,
        Some(raw) => {
            let parts: Vec<&str> = raw.split(',').collect();
            if parts.len() != 3 {
                return Err(CliError::Usage(format!(
                    "`--init` expects `theta,sigma,lambda`, found `{raw}`"
                )));
            }
            let mut vals = [0.0; 3];
            for (i, part) in parts.iter().enumerate() {
                vals[i] = part.trim().parse().map_err(|_| {
                    CliError::Usage(format!("`--init` component `{}` is not a number", part))
                })?;
            }
            InitStrategy::Given(params_from(vals[0], vals[1], vals[2])?)
        }
    };

    let file = File::open(&input)
        .map_err(|e| CliError::Io(format!("cannot read `{}`: {e}", input.display())))?;
    let path = read_path_csv(BufReader::new(file), delta).map_err(from_core)?;

    let mut config = FitConfig {
        init,
        ..FitConfig::default()
    };
    if let Some(m) = max_iter {
        config.max_iter = m;
    }
    if let Some(t) = tol {
        if t.is_nan() || t <= 0.0 {
            return Err(CliError::Usage(format!("`--tol` must be > 0, found {t}")));
        }
        config.grad_tol = t;
    }
    let report = fit_mle(&path, &config).map_err(from_core)?;
    emit_report(&report, delta, None, &args.out)?;
    Ok(())
}

fn cmd_lan(args: LanArgs, kv: &KvConfig) -> CliResult<()> {
    let theta0 = require(&args.theta0, kv, "theta0", "lan")?;
    let sigma0 = require(&args.sigma0, kv, "sigma0", "lan")?;
    let lambda0 = require(&args.lambda0, kv, "lambda0", "lan")?;
    let u = require(&args.u, kv, "u", "lan")?;
    let v = require(&args.v, kv, "v", "lan")?;
    let w = require(&args.w, kv, "w", "lan")?;
    let n = require(&args.n, kv, "n", "lan")?;
    let reps = require(&args.reps, kv, "reps", "lan")?;
    let seed = require(&args.seed, kv, "seed", "lan")?;
    let x0 = optional(&args.x0, kv, "x0")?.unwrap_or(0.0);
    let delta = optional(&args.delta, kv, "delta")?;
    let rule = match &args.delta_rule {
        Some(r) => Some(r.clone()),
        None => kv.get::<String>("delta-rule")?,
    };
    let (delta, rule) = resolve_delta(delta, &rule, n, "lan")?;

    let config = LanExperimentConfig {
        params0: params_from(theta0, sigma0, lambda0)?,
        z: LocalAlternative::new(u, v, w).map_err(from_core)?,
        scheme: SamplingScheme::new(n, delta, x0).map_err(from_core)?,
        reps,
        seed,
        mixture: MixtureConfig::default(),
    };
    config.validate().map_err(from_core)?;
    let report = run_lan(&config).map_err(from_core)?;
    if report.degenerate {
        eprintln!("note: degenerate sample (z = 0); KS statistic omitted");
    }
    emit_report(&report, delta, rule, &args.out)?;
    if let Some(raw) = &args.raw_csv {
        let mut wtr = create_file(raw)?;
        writeln!(wtr, "rep,loglr").map_err(|e| CliError::Io(e.to_string()))?;
        for (rep, value) in report.sample.iter().enumerate() {
            writeln!(wtr, "{},{}", rep, fmt_f64(*value))
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
        wtr.flush().map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(())
}

fn cmd_efficiency(args: EfficiencyArgs, kv: &KvConfig) -> CliResult<()> {
    let theta0 = require(&args.theta0, kv, "theta0", "efficiency")?;
    let sigma0 = require(&args.sigma0, kv, "sigma0", "efficiency")?;
    let lambda0 = require(&args.lambda0, kv, "lambda0", "efficiency")?;
    let n = require(&args.n, kv, "n", "efficiency")?;
    let reps = require(&args.reps, kv, "reps", "efficiency")?;
    let seed = require(&args.seed, kv, "seed", "efficiency")?;
    let x0 = optional(&args.x0, kv, "x0")?.unwrap_or(0.0);
    let delta = optional(&args.delta, kv, "delta")?;
    let rule = match &args.delta_rule {
        Some(r) => Some(r.clone()),
        None => kv.get::<String>("delta-rule")?,
    };
    let (delta, rule) = resolve_delta(delta, &rule, n, "efficiency")?;

    let params0 = params_from(theta0, sigma0, lambda0)?;
    let scheme = SamplingScheme::new(n, delta, x0).map_err(from_core)?;
    let mut fit = FitConfig::default();
    if let Some(m) = optional(&args.max_iter, kv, "max-iter")? {
        fit.max_iter = m;
    }
    if let Some(t) = optional(&args.tol, kv, "tol")? {
        fit.grad_tol = t;
    }
    let report = run_efficiency(params0, scheme, reps, seed, &fit).map_err(from_core)?;
    emit_report(&report, delta, rule, &args.out)?;
    Ok(())
}

fn cmd_ergodic(args: ErgodicArgs, kv: &KvConfig) -> CliResult<()> {
    let theta0 = require(&args.theta0, kv, "theta0", "ergodic")?;
    let sigma0 = require(&args.sigma0, kv, "sigma0", "ergodic")?;
    let lambda0 = require(&args.lambda0, kv, "lambda0", "ergodic")?;
    let g_name = require(&args.g, kv, "g", "ergodic")?;
    let n = require(&args.n, kv, "n", "ergodic")?;
    let seed = require(&args.seed, kv, "seed", "ergodic")?;
    let x0 = optional(&args.x0, kv, "x0")?.unwrap_or(0.0);
    let delta = optional(&args.delta, kv, "delta")?;
    let rule = match &args.delta_rule {
        Some(r) => Some(r.clone()),
        None => kv.get::<String>("delta-rule")?,
    };
    let (delta, rule) = resolve_delta(delta, &rule, n, "ergodic")?;

    let g: TestFunction = g_name.parse().map_err(from_core)?;
    let params0 = params_from(theta0, sigma0, lambda0)?;
    let scheme = SamplingScheme::new(n, delta, x0).map_err(from_core)?;
    let report = run_ergodic(params0, scheme, g, seed).map_err(from_core)?;
    emit_report(&report, delta, rule, &args.out)?;
    Ok(())
}
