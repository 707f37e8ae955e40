//! Experiment front end: parses a JSON experiment config, dispatches to the
//! library, and writes machine-readable tables plus a reproducibility
//! manifest. Exit codes: 0 success, 2 configuration error, 3 numeric failure.

mod config;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::Value;

use dirtail::bandit::{aggregate, run_replications, BanditExperiment};
use dirtail::dirichlet::{mc_crossing_prob, weighted_sum_density};
use dirtail::kinf::{a_transform, solve_kinf};
use dirtail::rng::derive_seed;
use dirtail::tail::{dp_bernstein_threshold, dp_hoeffding_threshold, sandwich_bounds};
use dirtail::Error as CoreError;

use config::{
    parse_dist, parse_params, parse_support, peek_command, BanditConfig, DensityConfig,
    DpBoundConfig, KinfConfig, OutputFormat, TailConfig,
};
use output::{extension, render, write_atomic, write_manifest, Cell, Table};

#[derive(Parser)]
#[command(
    name = "dirtail",
    version,
    about = "Dirichlet deviation bounds and Thompson sampling experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep K_inf, its dual maximizer, curvature, and the A-transform over mu.
    Kinf(RunArgs),
    /// Evaluate the exact density of the weighted Dirichlet sum.
    Density(RunArgs),
    /// Compare sandwich and Chernoff bounds against Monte-Carlo tails.
    Tail(RunArgs),
    /// Dirichlet-process posterior deviation thresholds.
    DpBound(RunArgs),
    /// Simulate Thompson-sampling bandits and record regret traces.
    Bandit(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config output format.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

/// Failure modes with their exit codes.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    fn io(msg: impl Into<String>) -> Self {
        CliError::Io(msg.into())
    }

    /// Core errors surfacing from config-provided values are config errors;
    /// only convergence failures count as numeric.
    fn from_config_err(e: CoreError) -> Self {
        match e {
            CoreError::NonConvergence(msg) => CliError::Numeric(msg),
            other => CliError::Config(other.to_string()),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numeric(m) | CliError::Io(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::Kinf(a) => ("kinf", a),
        Command::Density(a) => ("density", a),
        Command::Tail(a) => ("tail", a),
        Command::DpBound(a) => ("dp-bound", a),
        Command::Bandit(a) => ("bandit", a),
    };
    match run(name, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dirtail {name}: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(name: &'static str, args: &RunArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| CliError::config(format!("reading {}: {e}", args.config.display())))?;
    let command = peek_command(&text)?;
    if command != name {
        return Err(CliError::config(format!(
            "config is for command `{command}`, invoked as `{name}`"
        )));
    }
    match name {
        "kinf" => run_kinf(parse::<KinfConfig>(&text, args)?),
        "density" => run_density(parse::<DensityConfig>(&text, args)?),
        "tail" => run_tail(parse::<TailConfig>(&text, args)?),
        "dp-bound" => run_dp_bound(parse::<DpBoundConfig>(&text, args)?),
        "bandit" => run_bandit(parse::<BanditConfig>(&text, args)?),
        _ => unreachable!(),
    }
}

trait HasCommon {
    fn common_mut(&mut self) -> &mut config::Common;
}

macro_rules! impl_common {
    ($($ty:ty),*) => {$(
        impl HasCommon for $ty {
            fn common_mut(&mut self) -> &mut config::Common { &mut self.common }
        }
    )*};
}
impl_common!(
    KinfConfig,
    DensityConfig,
    TailConfig,
    DpBoundConfig,
    BanditConfig
);

/// Parses the full document and applies command-line overrides.
fn parse<T: serde::de::DeserializeOwned + HasCommon>(
    text: &str,
    args: &RunArgs,
) -> Result<T, CliError> {
    let mut cfg: T =
        serde_json::from_str(text).map_err(|e| CliError::config(format!("invalid config: {e}")))?;
    let common = cfg.common_mut();
    if let Some(seed) = args.seed {
        common.seed = seed;
    }
    if let Some(out) = &args.out {
        common.out = Some(out.display().to_string());
    }
    if let Some(format) = args.format {
        common.format = Some(format);
    }
    Ok(cfg)
}

struct Sink {
    out: PathBuf,
    format: OutputFormat,
    seed: u64,
}

fn sink(common: &config::Common) -> Result<Sink, CliError> {
    let out = common
        .out
        .as_ref()
        .ok_or_else(|| CliError::config("no output path: set `out` in the config or pass --out"))?;
    Ok(Sink {
        out: PathBuf::from(out),
        format: common.format.unwrap_or(OutputFormat::Csv),
        seed: common.seed,
    })
}

fn effective_config<T: serde::Serialize>(cfg: &T) -> Value {
    serde_json::to_value(cfg).expect("configs serialize")
}

fn finish(sink: &Sink, command: &str, config: Value, table: &Table) -> Result<(), CliError> {
    write_atomic(&sink.out, &render(table, sink.format))?;
    write_manifest(&sink.out, command, config, sink.seed)
}

fn run_kinf(cfg: KinfConfig) -> Result<(), CliError> {
    let sink = sink(&cfg.common)?;
    let p = parse_dist(&cfg.p)?;
    let f = parse_support(&cfg.f)?;
    let mut table = Table::new(vec![
        "mu",
        "kinf",
        "lambda_star",
        "sigma_sq",
        "a_transform",
        "at_boundary",
    ]);
    for &mu in &cfg.mu {
        let sol = solve_kinf(&p, &f, mu).map_err(CliError::from_config_err)?;
        let a = a_transform(&p, &f, mu).map_err(CliError::from_config_err)?;
        table.push(vec![
            Cell::Float(mu),
            Cell::Float(sol.value),
            Cell::Float(sol.lambda_star),
            Cell::Float(sol.sigma_sq),
            Cell::Float(a),
            Cell::Bool(sol.at_boundary),
        ]);
    }
    finish(&sink, "kinf", effective_config(&cfg), &table)
}

fn run_density(cfg: DensityConfig) -> Result<(), CliError> {
    let sink = sink(&cfg.common)?;
    let params = parse_params(&cfg.alpha)?;
    let f = parse_support(&cfg.f)?;
    let mut table = Table::new(vec!["u", "density"]);
    for &u in &cfg.u {
        let d = weighted_sum_density(&params, &f, u).map_err(CliError::from_config_err)?;
        table.push(vec![Cell::Float(u), Cell::Float(d)]);
    }
    finish(&sink, "density", effective_config(&cfg), &table)
}

fn run_tail(cfg: TailConfig) -> Result<(), CliError> {
    let sink = sink(&cfg.common)?;
    let params = parse_params(&cfg.alpha)?;
    let f = parse_support(&cfg.f)?;
    if cfg.n_samples == 0 {
        return Err(CliError::config("n_samples must be positive"));
    }
    let rows: Vec<Result<Vec<Cell>, CliError>> = cfg
        .mu
        .par_iter()
        .enumerate()
        .map(|(idx, &mu)| {
            let report =
                sandwich_bounds(&params, &f, mu, cfg.epsilon).map_err(CliError::from_config_err)?;
            let mc = mc_crossing_prob(
                &params,
                &f,
                mu,
                cfg.n_samples,
                derive_seed(cfg.common.seed, idx as u64),
            )
            .map_err(CliError::from_config_err)?;
            Ok(vec![
                Cell::Float(mu),
                Cell::Float(report.lower),
                Cell::Float(mc.estimate),
                Cell::Float(mc.std_error),
                Cell::Float(report.upper),
                Cell::Float(report.chernoff),
                Cell::Bool(report.condition_met),
            ])
        })
        .collect();
    let mut table = Table::new(vec![
        "mu",
        "lower",
        "mc_estimate",
        "mc_stderr",
        "upper",
        "chernoff",
        "condition_met",
    ]);
    for row in rows {
        table.push(row?);
    }
    finish(&sink, "tail", effective_config(&cfg), &table)
}

fn run_dp_bound(cfg: DpBoundConfig) -> Result<(), CliError> {
    let sink = sink(&cfg.common)?;
    let mut table = Table::new(vec!["delta", "threshold", "gamma_admissible"]);
    for &delta in &cfg.delta {
        let result = match cfg.kind.as_str() {
            "hoeffding" => {
                if cfg.empirical_variance.is_some() {
                    return Err(CliError::config(
                        "`empirical_variance` applies to the bernstein kind only",
                    ));
                }
                dp_hoeffding_threshold(cfg.n, cfg.gamma, cfg.epsilon, delta)
            }
            "bernstein" => {
                let variance = cfg
                    .empirical_variance
                    .ok_or_else(|| CliError::config("bernstein kind needs `empirical_variance`"))?;
                dp_bernstein_threshold(cfg.n, cfg.gamma, cfg.epsilon, delta, variance)
            }
            other => return Err(CliError::config(format!("unknown kind `{other}`"))),
        }
        .map_err(CliError::from_config_err)?;
        table.push(vec![
            Cell::Float(delta),
            Cell::Float(result.threshold),
            Cell::Bool(result.gamma_admissible),
        ]);
    }
    finish(&sink, "dp-bound", effective_config(&cfg), &table)
}

fn run_bandit(cfg: BanditConfig) -> Result<(), CliError> {
    let sink = sink(&cfg.common)?;
    if cfg.replications == 0 {
        return Err(CliError::config("replications must be positive"));
    }
    let arms = cfg
        .arms
        .iter()
        .map(|a| a.to_spec())
        .collect::<Result<Vec<_>, _>>()?;
    let experiment = BanditExperiment {
        arms,
        horizon: cfg.horizon,
        prior: cfg.prior_kind()?,
        algo: cfg.algo()?,
    };
    let runs = run_replications(&experiment, cfg.common.seed, cfg.replications)
        .map_err(CliError::from_config_err)?;

    let ext = extension(sink.format);
    let prefix = sink.out.display();
    for (rep, run) in runs.iter().enumerate() {
        let mut table = Table::new(vec!["t", "arm", "cum_regret"]);
        for (i, (&arm, &regret)) in run
            .trace
            .arms_chosen
            .iter()
            .zip(&run.trace.cum_regret)
            .enumerate()
        {
            table.push(vec![
                Cell::Int(i as u64 + 1),
                Cell::Int(arm as u64),
                Cell::Float(regret),
            ]);
        }
        let path = PathBuf::from(format!("{prefix}.rep{rep:04}.trace.{ext}"));
        write_atomic(&path, &render(&table, sink.format))?;
    }

    let mut table = Table::new(vec!["t", "mean_regret", "std_error", "lower_line"]);
    for point in aggregate(&runs) {
        table.push(vec![
            Cell::Int(point.t),
            Cell::Float(point.mean_regret),
            Cell::Float(point.std_error),
            Cell::OptFloat(point.lower_line),
        ]);
    }
    let aggregate_path = PathBuf::from(format!("{prefix}.aggregate.{ext}"));
    write_atomic(&aggregate_path, &render(&table, sink.format))?;
    write_manifest(
        Path::new(&format!("{prefix}")),
        "bandit",
        effective_config(&cfg),
        sink.seed,
    )
}
