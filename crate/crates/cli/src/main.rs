use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use mdenoise::backend::LapackBackend;
use mdenoise::curves::{curve, gamma_grid, transition, write_curve, write_transition};
use mdenoise::denoise::{denoise, DenoiseRequest};
use mdenoise::experiment::{run_experiment, ExperimentConfig, OutputPaths, Plan, LARGE_N};
use mdenoise::io::{read_matrix, write_matrix, PriorSource};
use mdenoise::spectrum::{spectrum, write_spectrum};
use mdenoise::{exit_code, InvalidInput, EXIT_INVALID};
use mdenoise_core::estimators::{AmpOptions, Method};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Parser, Debug)]
#[command(name = "mdenoise", version, about = "Bayesian denoising of large symmetric matrices")]
struct Cli {
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file or stem, depending on the verb.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// TOML file whose keys mirror the flags; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Allow N above 6000.
    #[arg(long, global = true)]
    large: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte-Carlo grid over sizes, SNRs and methods.
    #[command(after_help = "Writes <out>.csv with columns \
        n,gamma,method,mean_mse,stderr,stddev,trials,seeds,error, a JSON report <out>.json and the \
        resumable cell log <out>.cells.jsonl. <out> defaults to `experiment`.")]
    Experiment(ExperimentArgs),
    /// MMSE and mutual information of the linear-rank model on a gamma grid.
    #[command(after_help = "CSV columns: gamma,mmse,mi,warning. Written to --out or standard output.")]
    MmseCurve(CurveArgs),
    /// Same output as mmse-curve.
    #[command(after_help = "CSV columns: gamma,mmse,mi,warning. Written to --out or standard output.")]
    MiCurve(CurveArgs),
    /// MMSE derivatives and a logarithmic singularity fit around a critical SNR.
    #[command(after_help = "Writes <out>.csv with columns gamma,mmse,d1,d2,d3,d4,warning and the fit \
        as <out>.json. <out> defaults to `transition`.")]
    Transition(TransitionArgs),
    /// Histogram of one realization against the predicted spectral density.
    #[command(after_help = "Writes <out>.hist.csv (bin_lo,bin_hi,density) and <out>.theory.csv \
        (x,density); prints a JSON summary with the KS distance. <out> defaults to `spectrum`.")]
    Spectrum(SpectrumArgs),
    /// Estimate the signal from one observed matrix.
    #[command(after_help = "Matrices are read and written as .csv (dense, square) or the MDNZ1 binary \
        format (any other extension). Diagnostics are printed as JSON on standard error.")]
    Denoise(DenoiseArgs),
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct ExperimentArgs {
    /// factor, sublinear or linear.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    signal: Option<String>,
    /// Scalar prior of the factor entries.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    prior: Option<String>,
    /// Spectral prior (spec or measure file) for rotation-invariant signals.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    spectrum: Option<String>,
    /// Rank exponent, M = floor(N^alpha).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    /// Fixed rank.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    rank: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    noise: Option<String>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    gammas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    methods: Option<Vec<String>>,
    /// rank or dim.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    normalization: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    hilbert: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    amp_tol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    amp_max_iter: Option<usize>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct CurveArgs {
    /// Spectral prior: rademacher, bernoulli:p, mp:q, wigner or a measure file.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    prior: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_min: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_step: Option<f64>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct TransitionArgs {
    /// Closed-form spectral prior.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    prior: Option<String>,
    /// Defaults to the prior's own critical SNR.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_c: Option<f64>,
    /// Grid step [default: 0.005].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    h: Option<f64>,
    /// [default: 0.05]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    half_width: Option<f64>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct SpectrumArgs {
    /// Spectral prior of the signal.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    spectrum: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    /// [default: 1000]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    /// [default: 60]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    bins: Option<usize>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct DenoiseArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    /// rie-linear, rie-sublinear, oracle or dec-amp.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    method: Option<String>,
    /// wigner, uniform:a,b or a spectral prior [default: wigner].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    noise: Option<String>,
    /// empirical, empirical:<eta> or density:<measure file | spectral prior>.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    hilbert: Option<String>,
    /// Scalar prior of the factor entries (dec-amp).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    prior: Option<String>,
    /// Number of spikes (dec-amp).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    rank: Option<usize>,
    /// True signal (oracle).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    signal: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    amp_tol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    amp_max_iter: Option<usize>,
}

const GLOBAL_KEYS: [&str; 4] = ["seed", "threads", "out", "large"];

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    InvalidInput(msg.into()).into()
}

fn load_config(path: Option<&Path>) -> Result<Map<String, Value>> {
    let Some(path) = path else {
        return Ok(Map::new());
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let table: toml::Table = toml::from_str(&text).map_err(|e| invalid(format!("config: {e}")))?;
    match serde_json::to_value(table)? {
        Value::Object(m) => Ok(m),
        _ => Err(invalid("config must be a table")),
    }
}

/// Flags set on the command line replace the file's keys.
fn merged<A: Serialize, T: DeserializeOwned>(file: &Map<String, Value>, flags: &A, drop_globals: bool) -> Result<T> {
    let mut m = file.clone();
    if drop_globals {
        for k in GLOBAL_KEYS {
            m.remove(k);
        }
    }
    if let Value::Object(f) = serde_json::to_value(flags)? {
        m.extend(f);
    }
    serde_json::from_value(Value::Object(m)).map_err(|e| invalid(format!("config: {e}")))
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| invalid(format!("--{flag} is required")))
}

fn with_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(ext);
    PathBuf::from(s)
}

fn run(cli: Cli) -> Result<()> {
    let file = load_config(cli.config.as_deref())?;
    let seed = match cli.seed {
        Some(s) => s,
        None => file
            .get("seed")
            .map(|v| serde_json::from_value(v.clone()))
            .transpose()
            .map_err(|e| invalid(format!("config seed: {e}")))?
            .unwrap_or(0),
    };
    let threads = cli.threads.or_else(|| file.get("threads").and_then(Value::as_u64).map(|t| t as usize));
    let large = cli.large || file.get("large").and_then(Value::as_bool).unwrap_or(false);
    let out = cli.out.clone().or_else(|| file.get("out").and_then(Value::as_str).map(PathBuf::from));
    if let Some(t) = threads {
        if t == 0 {
            return Err(invalid("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let backend = LapackBackend;
    match cli.command {
        Command::Experiment(args) => {
            let mut config: ExperimentConfig = merged(&file, &args, true)?;
            config.seed = seed;
            let plan = Plan::new(config, large)?;
            let stem = out.unwrap_or_else(|| PathBuf::from("experiment"));
            let paths = OutputPaths::from_stem(&stem);
            let report = run_experiment(&plan, &paths, &backend)?;
            log::info!("wrote {} rows to {}", report.rows.len(), paths.csv.display());
            let failed = report.rows.iter().filter(|r| !r.error.is_empty()).count();
            if failed > 0 {
                eprintln!("{failed} cells carry an error marker");
            }
        }
        Command::MmseCurve(args) | Command::MiCurve(args) => {
            let a: CurveArgs = merged(&file, &args, false)?;
            let source = PriorSource::parse(&required(a.prior, "prior")?)?;
            let grid =
                gamma_grid(a.gamma_min.unwrap_or(0.01), a.gamma_max.unwrap_or(2.0), a.gamma_step.unwrap_or(0.01))?;
            let rows = curve(&source, &grid);
            match out {
                Some(p) => write_curve(std::fs::File::create(&p)?, &rows)?,
                None => write_curve(std::io::stdout().lock(), &rows)?,
            }
        }
        Command::Transition(args) => {
            let a: TransitionArgs = merged(&file, &args, false)?;
            let prior = required(a.prior, "prior")?;
            let spec = PriorSource::parse(&prior)?
                .spec()
                .ok_or_else(|| invalid(format!("transition needs a closed-form prior, got `{prior}`")))?;
            let (rows, fit) = transition(&spec, a.gamma_c, a.h.unwrap_or(0.005), a.half_width.unwrap_or(0.05))?;
            let stem = out.unwrap_or_else(|| PathBuf::from("transition"));
            write_transition(&with_ext(&stem, ".csv"), &with_ext(&stem, ".json"), &rows, &fit)?;
            println!("{}", serde_json::to_string_pretty(&fit)?);
        }
        Command::Spectrum(args) => {
            let a: SpectrumArgs = merged(&file, &args, false)?;
            let n = a.n.unwrap_or(1000);
            if n > LARGE_N && !large {
                return Err(invalid(format!("N = {n} exceeds {LARGE_N}; pass --large")));
            }
            let source = PriorSource::parse(&required(a.spectrum, "spectrum")?)?;
            let r = spectrum(&source, required(a.gamma, "gamma")?, n, seed, a.bins.unwrap_or(60), &backend)?;
            write_spectrum(&out.unwrap_or_else(|| PathBuf::from("spectrum")), &r)?;
            println!("{}", serde_json::to_string_pretty(&r.summary)?);
        }
        Command::Denoise(args) => {
            let a: DenoiseArgs = merged(&file, &args, false)?;
            let method: Method = required(a.method, "method")?.parse()?;
            let y = read_matrix(&required(a.input, "input")?)?;
            let out = required(out, "out")?;
            let defaults = AmpOptions::default();
            let req = DenoiseRequest {
                gamma: required(a.gamma, "gamma")?,
                method,
                noise: a.noise.unwrap_or_else(|| "wigner".into()),
                hilbert: a.hilbert.unwrap_or_else(|| "empirical".into()),
                prior: a.prior,
                rank: a.rank,
                signal: a.signal,
                seed,
                amp: AmpOptions {
                    tol: a.amp_tol.unwrap_or(defaults.tol),
                    max_iter: a.amp_max_iter.unwrap_or(defaults.max_iter),
                    ..defaults
                },
            };
            let (estimate, diag) = denoise(&y, &req, &backend)?;
            write_matrix(&out, &estimate)?;
            let mut err = std::io::stderr().lock();
            writeln!(err, "{}", serde_json::to_string(&diag)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
