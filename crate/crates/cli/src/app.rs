//! Argument parsing and I/O around the experiment commands.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::commands::{self, Tolerances};
use crate::config::{self, ConfigFile, ExperimentGrid, OneOrMany};
use crate::error::{exit, CliError, Result};
use crate::output;

#[derive(Debug, Parser)]
#[command(
    name = "semcom",
    version,
    about = "Status-update policy simulator and exact analyser"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a configuration (or every configuration of a grid).
    Run(ExperimentArgs),
    /// Simulate a parameter grid; list-valued flags and config keys span it.
    Sweep(ExperimentArgs),
    /// Compare simulation against the exact stationary analysis.
    Compare(CompareArgs),
    /// Print exact long-run metrics without simulating.
    Oracle(ExperimentArgs),
    /// Regenerate the slow- and rapid-source result tables.
    ReproducePaper(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Policies: uniform, age, change, e2e (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub policy: Vec<String>,
    /// Probability of staying in state 0.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,
    /// Probability of staying in state 1.
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<f64>,
    /// Channel success probability.
    #[arg(long, value_delimiter = ',')]
    pub ps: Vec<f64>,
    /// Sampling period of the uniform policy.
    #[arg(long, value_delimiter = ',')]
    pub period: Vec<u32>,
    /// Age threshold of the age-aware policy.
    #[arg(long, value_delimiter = ',')]
    pub threshold: Vec<u32>,
    #[arg(long)]
    pub slots: Option<u64>,
    /// Base seed; falls back to SEMCOM_SEED, then 42.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Independent replications per scenario.
    #[arg(long)]
    pub runs: Option<usize>,
    /// Output CSV path (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write per-slot traces next to the output file.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Absolute tolerance on reconstruction error and uninformative fraction.
    #[arg(long, default_value_t = 0.005)]
    pub tol_abs: f64,
    /// Relative tolerance on actuation cost and transmission rate.
    #[arg(long, default_value_t = 0.01)]
    pub tol_rel: f64,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, default_value_t = commands::REPRODUCE_SLOTS)]
    pub slots: u64,
    #[arg(long, default_value_t = commands::REPRODUCE_SEED)]
    pub seed: u64,
}

fn axis<T: Clone>(v: &[T]) -> Option<OneOrMany<T>> {
    match v.len() {
        0 => None,
        1 => Some(OneOrMany::One(v[0].clone())),
        _ => Some(OneOrMany::Many(v.to_vec())),
    }
}

impl ExperimentArgs {
    fn overrides(&self) -> ConfigFile {
        ConfigFile {
            policy: axis(&self.policy),
            p: axis(&self.p),
            q: axis(&self.q),
            ps: axis(&self.ps),
            period: axis(&self.period),
            threshold: axis(&self.threshold),
            slots: self.slots,
            seed: self.seed,
            runs: self.runs,
            cost: None,
            trace: self.trace.then_some(true),
        }
    }

    /// File values overlaid with flags, then expanded.
    pub fn grid(&self) -> Result<ExperimentGrid> {
        let base = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let merged = base.merge(self.overrides());
        let env_seed = std::env::var(config::SEED_ENV).ok();
        config::expand(&merged, env_seed.as_deref())
    }
}

fn write_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn write_provenance(path: &Path, effective: &ConfigFile) -> Result<()> {
    let json = serde_json::to_string_pretty(effective).map_err(|e| CliError::Runtime(e.to_string()))?;
    write_text(Some(path), &(json + "\n"))
}

fn finish_experiment(args: &ExperimentArgs, grid: &ExperimentGrid, csv: &str) -> Result<()> {
    write_text(args.out.as_deref(), csv)?;
    if let Some(out) = &args.out {
        write_provenance(&config::sidecar_path(out, "config.json"), &grid.effective)?;
    }
    Ok(())
}

fn run_experiment(args: &ExperimentArgs) -> Result<()> {
    let grid = args.grid()?;
    if grid.effective.trace == Some(true) && args.out.is_none() {
        return Err(CliError::InvalidConfig(
            "tracing needs --out to place the trace files".into(),
        ));
    }
    let report = commands::cmd_run(&grid)?;
    for (i, agg) in &report.aggregates {
        let s = &grid.scenarios[*i];
        eprintln!(
            "{} p={} q={} ps={}: mean {} stderr {} over {} runs",
            s.policy(),
            output::format_g6(s.p),
            output::format_g6(s.q),
            output::format_g6(s.ps()),
            output::metric_fields(&agg.mean),
            output::metric_fields(&agg.stderr),
            agg.runs.len()
        );
    }
    if let Some(out) = &args.out {
        for (i, trace) in &report.traces {
            let suffix = if grid.len() == 1 {
                "trace.csv".to_string()
            } else {
                format!("trace-{i}.csv")
            };
            write_text(Some(&config::sidecar_path(out, &suffix)), &output::trace_csv(trace))?;
        }
    }
    finish_experiment(args, &grid, &report.csv)
}

fn run_oracle(args: &ExperimentArgs) -> Result<()> {
    let grid = args.grid()?;
    let (csv, problems) = commands::cmd_oracle(&grid)?;
    for (i, message) in problems {
        eprintln!("row {}: {message}", i + 1);
    }
    finish_experiment(args, &grid, &csv)
}

fn run_compare(args: &CompareArgs) -> Result<()> {
    let grid = args.experiment.grid()?;
    let tol = Tolerances {
        abs: args.tol_abs,
        rel: args.tol_rel,
    };
    let report = commands::cmd_compare(&grid, tol)?;
    finish_experiment(&args.experiment, &grid, &report.csv)?;
    match report.failures() {
        0 => Ok(()),
        n => Err(CliError::Tolerance(n)),
    }
}

fn run_reproduce(args: &ReproduceArgs) -> Result<()> {
    if args.slots == 0 {
        return Err(CliError::InvalidConfig("`slots` must be at least 1".into()));
    }
    std::fs::create_dir_all(&args.out)?;
    let (slow, rapid) = commands::cmd_reproduce_paper(args.slots, args.seed)?;
    write_text(Some(&args.out.join("slow_source.csv")), &slow)?;
    write_text(Some(&args.out.join("rapid_source.csv")), &rapid)?;
    let effective = ConfigFile {
        policy: Some(OneOrMany::Many(vec![
            "uniform".into(),
            "age".into(),
            "change".into(),
            "e2e".into(),
        ])),
        p: Some(OneOrMany::Many(vec![commands::SLOW_SOURCE.0, commands::RAPID_SOURCE.0])),
        q: Some(OneOrMany::Many(vec![commands::SLOW_SOURCE.1, commands::RAPID_SOURCE.1])),
        ps: Some(OneOrMany::Many(commands::CHANNELS.to_vec())),
        period: Some(OneOrMany::One(config::DEFAULT_PERIOD)),
        threshold: Some(OneOrMany::One(config::DEFAULT_THRESHOLD)),
        slots: Some(args.slots),
        seed: Some(args.seed),
        ..Default::default()
    };
    write_provenance(&args.out.join("reproduce-paper.config.json"), &effective)
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run(args) | Command::Sweep(args) => run_experiment(args),
        Command::Oracle(args) => run_oracle(args),
        Command::Compare(args) => run_compare(args),
        Command::ReproducePaper(args) => run_reproduce(args),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                exit::INVALID_CONFIG
            } else {
                exit::SUCCESS
            };
        }
    };
    match execute(&cli) {
        Ok(()) => exit::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
