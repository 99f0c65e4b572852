//! `qndsim`: configuration-driven scenario runner writing CSV artifacts and a
//! hash manifest.
//!
//! Exit codes: 0 success, 2 configuration error, 3 runtime error.

pub mod artifacts;
pub mod config;
pub mod scenarios;
pub mod sweep;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::artifacts::ArtifactWriter;
use crate::config::{ExperimentConfig, FieldError};
use crate::scenarios::{run_scenario, Metrics, RunContext, ScenarioKind};
use crate::sweep::{parse_grid, run_sweep, SweepError, SweepParam};

/// Environment variable naming the default output root.
pub const OUTPUT_ENV: &str = "QNDSIM_OUT";

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_RUNTIME: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "qndsim", version, about = "Broadband QND gate scenario runner")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the scenario named in the config.
    Run(RunArgs),
    /// Run the scenario once per value of one parameter.
    Sweep(SweepArgs),
    /// Print the available scenarios.
    ListScenarios,
    /// Check a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Override the config's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (default: config `output`, else `$QNDSIM_OUT/<scenario>`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub parallel: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// squeeze_db_dc, ff_gain_error, delay_mismatch (ns) or gain.
    #[arg(long)]
    pub param: String,
    /// Comma-separated grid; empty for no runs.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub values: String,
}

#[derive(Debug)]
enum Failure {
    Config(Vec<FieldError>),
    Runtime(String),
}

impl Failure {
    fn config(field: &str, message: impl Into<String>) -> Self {
        Self::Config(vec![FieldError {
            field: field.into(),
            message: message.into(),
        }])
    }
}

/// Parses the command line and runs it; returns the process exit code.
pub fn run_cli<I, S>(args: I) -> u8
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(Failure::Config(errs)) => {
            for e in errs {
                eprintln!("config error: {e}");
            }
            EXIT_CONFIG
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("runtime error: {msg}");
            EXIT_RUNTIME
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::ListScenarios => {
            for k in ScenarioKind::ALL {
                println!("{:<12} {}", k.label(), k.description());
            }
            Ok(())
        }
        Command::Validate { config } => {
            let (cfg, dir) = load(&config, None)?;
            cfg.validate(&dir).map_err(Failure::Config)?;
            println!("{}: ok", config.display());
            Ok(())
        }
        Command::Run(args) => with_pool(args.parallel, || run(&args)),
        Command::Sweep(args) => with_pool(args.run.parallel, || sweep(&args)),
    }
}

fn with_pool(
    threads: Option<usize>,
    f: impl FnOnce() -> Result<(), Failure> + Send,
) -> Result<(), Failure> {
    match threads {
        None => f(),
        Some(0) => Err(Failure::config("--parallel", "must be at least 1")),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Failure::Runtime(e.to_string()))?
            .install(f),
    }
}

/// Reads the config and applies the seed override; returns the directory
/// relative paths in the config resolve against.
fn load(path: &Path, seed: Option<u64>) -> Result<(ExperimentConfig, PathBuf), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::config("--config", format!("{}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::from_toml(&text).map_err(Failure::Config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((cfg, dir))
}

fn output_dir(args: &RunArgs, cfg: &ExperimentConfig) -> PathBuf {
    if let Some(o) = &args.out {
        return o.clone();
    }
    if let Some(o) = &cfg.output {
        return o.clone();
    }
    let root = std::env::var_os(OUTPUT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("qndsim-out"));
    root.join(&cfg.scenario)
}

fn print_metrics(m: &Metrics) {
    for (k, v) in m {
        println!("{k}={v}");
    }
}

fn runtime<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Runtime(e.to_string())
}

fn run(args: &RunArgs) -> Result<(), Failure> {
    let (cfg, dir) = load(&args.config, args.seed)?;
    let pipeline = cfg.validate(&dir).map_err(Failure::Config)?;
    let kind: ScenarioKind = cfg
        .scenario
        .parse()
        .map_err(|m: String| Failure::config("scenario", m))?;
    let out_dir = output_dir(args, &cfg);
    let mut out = ArtifactWriter::create(&out_dir).map_err(runtime)?;
    let config_text = cfg.to_toml();
    out.write("config.toml", &config_text).map_err(runtime)?;
    let ctx = RunContext {
        config: cfg,
        pipeline,
    };
    let metrics = run_scenario(kind, &ctx, &mut out).map_err(runtime)?;
    let manifest = out
        .finish(kind.label(), ctx.config.seed, &config_text)
        .map_err(runtime)?;
    print_metrics(&metrics);
    println!(
        "wrote {} files to {}",
        manifest.files.len() + 1,
        out_dir.display()
    );
    Ok(())
}

fn sweep(args: &SweepArgs) -> Result<(), Failure> {
    let param: SweepParam = args
        .param
        .parse()
        .map_err(|m: String| Failure::config("--param", m))?;
    let grid = parse_grid(&args.values).map_err(|e| Failure::Config(vec![e]))?;
    let (cfg, dir) = load(&args.run.config, args.run.seed)?;
    // The base config must be valid even when the grid is empty.
    cfg.validate(&dir).map_err(Failure::Config)?;
    let out_dir = output_dir(&args.run, &cfg);
    let mut out = ArtifactWriter::create(&out_dir).map_err(runtime)?;
    let config_text = cfg.to_toml();
    out.write("config.toml", &config_text).map_err(runtime)?;
    run_sweep(&cfg, &dir, param, &grid, &mut out).map_err(|e| match e {
        SweepError::Config(errs) => Failure::Config(errs),
        SweepError::Run(e) => runtime(e),
    })?;
    let manifest = out
        .finish(&cfg.scenario, cfg.seed, &config_text)
        .map_err(runtime)?;
    println!(
        "{} points; wrote {} files to {}",
        grid.len(),
        manifest.files.len() + 1,
        out_dir.display()
    );
    Ok(())
}
