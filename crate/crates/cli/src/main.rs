//! `fnls-lab`: simulate, verify, probe, sweep and report.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use fnls_core::experiments::{self, ExperimentConfig, Outcome};

#[derive(Parser, Debug)]
#[command(name = "fnls-lab", version, about = "Pseudo-spectral lab for the cubic fractional NLS on the torus")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Debug)]
struct Global {
    /// Experiment configuration (TOML, or JSON by extension); built-in default otherwise.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override a configuration entry, e.g. `--set equation.alpha=2.5`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker threads.
    #[arg(long, global = true, env = "FNLS_LAB_JOBS", value_name = "N")]
    jobs: Option<usize>,
    /// Parent directory for artifact directories (overrides `output_dir`).
    #[arg(long, global = true, value_name = "DIR")]
    output: Option<PathBuf>,
    /// Random seed (overrides `seed`).
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Integrate the configured equation and write a trajectory directory.
    Simulate,
    /// Run the identity and lemma suite; writes a pass/fail summary.
    Verify,
    /// Run the bound probes; writes bound reports.
    Probe,
    /// Measure the almost-conservation decrement across I-operator cutoffs.
    Sweep {
        /// `torus` or `line`.
        #[arg(long)]
        variant: Option<String>,
        /// Dispersion exponent.
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        /// Sobolev index of the I-operator.
        #[arg(long, allow_negative_numbers = true)]
        s: Option<f64>,
    },
    /// Render tables and gnuplot scripts for an artifact directory.
    Report {
        dir: PathBuf,
    },
}

fn overrides(global: &Global, command: &Cmd) -> Vec<String> {
    let mut out = global.set.clone();
    if let Some(dir) = &global.output {
        out.push(format!("output_dir={}", serde_string(&dir.to_string_lossy())));
    }
    if let Some(seed) = global.seed {
        out.push(format!("seed={seed}"));
    }
    if let Cmd::Sweep { variant, alpha, s } = command {
        if let Some(v) = variant {
            out.push(format!("sweep.variant={}", serde_string(v)));
        }
        if let Some(a) = alpha {
            out.push(format!("sweep.alpha={a:?}"));
        }
        if let Some(s) = s {
            out.push(format!("sweep.s={s:?}"));
        }
    }
    out
}

/// Quotes a value so an override never reinterprets it as a number or list.
fn serde_string(v: &str) -> String {
    format!("{v:?}")
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    if let Cmd::Report { dir } = &cli.command {
        return Ok(experiments::report(dir)?);
    }
    let config = ExperimentConfig::load(cli.global.config.as_deref(), &overrides(&cli.global, &cli.command))?;
    let outcome = experiments::with_jobs(cli.global.jobs, || match cli.command {
        Cmd::Simulate => experiments::simulate(&config),
        Cmd::Verify => experiments::verify(&config),
        Cmd::Probe => experiments::probe(&config),
        Cmd::Sweep { .. } => experiments::sweep(&config),
        Cmd::Report { .. } => unreachable!("handled above"),
    })?
    .with_context(|| format!("{} failed", config.name))?;
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            if !outcome.summary.ends_with('\n') && !outcome.summary.is_empty() {
                println!();
            }
            let status = if outcome.passed { "PASS" } else { "FAIL" };
            println!("{} {status}: {}", outcome.command.name(), outcome.dir.display());
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
