//! `rotorbath`: simulate the bath-coupled kicked rotor, sweep parameters,
//! run classical diagnostics and render plots.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure,
//! 3 I/O failure.

mod config;
mod diagnose;
mod failure;
mod output;
mod plot;
mod simulate;
mod sweep;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rotorbath::{RawConfig, ValidatedConfig};

use diagnose::{Diagnostic, Instant, Settings};
use failure::{CliResult, Failure};
use output::{ensure_dir, RunManifest};
use simulate::Mode;
use sweep::SweepParam;

/// Worker-count cap for all parallel sections.
const THREADS_VAR: &str = "ROTORBATH_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "rotorbath",
    version,
    about = "Kicked rotor coupled to an ohmic bath"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ConfigArgs {
    /// Key-value configuration file (`K = 3.5`, `hbar = 0.46`, ...).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override one configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Number of kicks (overrides the file).
    #[arg(long)]
    kicks: Option<usize>,
    /// Seed recorded in the manifest and used by stochastic diagnostics.
    #[arg(long)]
    seed: Option<u64>,
}

impl ConfigArgs {
    fn raw(&self) -> CliResult<RawConfig> {
        let file = config::load(self.config.as_deref())?;
        let mut raw = config::apply_overrides(&file, &self.set)?;
        if self.kicks.is_some() {
            raw.kicks = self.kicks;
        }
        if self.seed.is_some() {
            raw.seed = self.seed;
        }
        Ok(raw)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evolve one configuration and write entropy.csv, fit.json, manifest.json.
    Simulate {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, value_enum, default_value_t = Mode::Both)]
        mode: Mode,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// One run per value of a parameter plus sweep_summary.csv.
    Sweep {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Comma-separated values, at least two distinct.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        values: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Mode::Both)]
        mode: Mode,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Classical diagnostics: Lyapunov exponent, diffusion rate or marginals.
    Diagnose {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, value_enum)]
        what: Diagnostic,
        /// Map iterations for lyapunov and diffusion.
        #[arg(long)]
        steps: Option<usize>,
        /// Orbits in the diffusion ensemble.
        #[arg(long, default_value_t = 10_000)]
        ensemble: usize,
        /// Marginal snapshot times: `n` after kick n, `n-` just before it.
        #[arg(long, value_delimiter = ',', default_value = "0,1-,1")]
        times: Vec<Instant>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// SVG charts and a matplotlib script from a run or sweep directory.
    Plot {
        /// Directory written by simulate or sweep.
        dir: PathBuf,
    },
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::config(format!(
            "{THREADS_VAR} must be a positive integer, got {v:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::config(format!("thread pool: {e}")))
}

fn resolve(raw: &RawConfig) -> CliResult<ValidatedConfig> {
    let cfg = raw.resolve()?;
    for note in cfg.notes() {
        eprintln!("note: {note}");
    }
    Ok(cfg)
}

fn simulate(cfg: &ConfigArgs, mode: Mode, out: &Path) -> CliResult<()> {
    let raw = cfg.raw()?;
    let validated = resolve(&raw)?;
    let report = simulate::write_run(out, "simulate", &validated, mode, raw.seed)?;
    println!("{}", simulate::describe(&report));
    Ok(())
}

fn diagnose(
    cfg: &ConfigArgs,
    what: Diagnostic,
    steps: Option<usize>,
    ensemble: usize,
    times: Vec<Instant>,
    out: &Path,
) -> CliResult<()> {
    let raw = cfg.raw()?;
    let validated = resolve(&raw)?;
    let seed = raw.seed.unwrap_or(1);
    ensure_dir(out)?;
    let mut manifest = RunManifest::start("diagnose", out, Some(seed));
    manifest.config = Some(RawConfig::from_validated(&validated, Some(seed)));
    let settings = Settings {
        steps: steps.unwrap_or(match what {
            Diagnostic::Lyapunov => 100_000,
            _ => 500,
        }),
        ensemble,
        seed,
        times,
    };
    let text = diagnose::run(&mut manifest, &validated, what, &settings)?;
    manifest.finish()?;
    println!("{text}");
    Ok(())
}

fn execute(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match cli.command {
        Command::Simulate { cfg, mode, out } => simulate(&cfg, mode, &out),
        Command::Sweep {
            cfg,
            param,
            values,
            mode,
            out,
        } => {
            let raw = cfg.raw()?;
            sweep::run(&out, &raw, param, &values, mode, raw.seed)?;
            println!("sweep over {param} written to {}", out.display());
            Ok(())
        }
        Command::Diagnose {
            cfg,
            what,
            steps,
            ensemble,
            times,
            out,
        } => diagnose(&cfg, what, steps, ensemble, times, &out),
        Command::Plot { dir } => {
            for f in plot::run(&dir)? {
                println!("{}", dir.join(f).display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    }
}
