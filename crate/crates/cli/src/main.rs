//! `condeng` command-line front end.

mod commands;
mod config;
mod error;
mod output;
mod specs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{required, ConfigFile, Format, Preset};
use error::{CliError, Result};

#[derive(Parser)]
#[command(name = "condeng", version, about = "Conditional state engineering with two-mode couplers")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Fock cutoff of the signal mode.
    #[arg(long, global = true)]
    cutoff: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal qubit design over a log-spaced range of q = c1/c0.
    QubitSweep {
        #[arg(long, allow_negative_numbers = true)]
        qmin: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        qmax: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Idler pulse sequence that prepares a target state.
    Synthesize {
        #[arg(long)]
        target: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        coupler: Option<String>,
        #[arg(long)]
        kind: Option<String>,
    },
    /// Feedback-driven Fock state preparation in a lossy cavity.
    FockRun {
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        #[arg(long)]
        r2: Option<f64>,
        #[arg(long)]
        eta_d: Option<f64>,
        #[arg(long)]
        eta_f: Option<f64>,
        #[arg(long)]
        target_n: Option<usize>,
        /// Explicit detection trips, comma separated.
        #[arg(long, value_delimiter = ',')]
        trips: Option<Vec<usize>>,
        /// Number of final probabilities reported.
        #[arg(long)]
        rows: Option<usize>,
    },
    /// Conditional signal operator for given idler input and outcome.
    Yop {
        #[arg(long, allow_hyphen_values = true)]
        coupler: Option<String>,
        #[arg(long)]
        kind: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        f: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        g: Option<String>,
    },
    /// Pseudo-unitarity of multiport couplers.
    MultiportCheck {
        #[arg(long, allow_hyphen_values = true)]
        coupler: Option<String>,
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        draws: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn run(cli: Cli) -> Result<()> {
    let file = match &cli.common.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let out = cli.common.out.or(file.out.clone());
    let format = cli.common.format.or(file.format);
    let cutoff = cli.common.cutoff.or(file.cutoff);
    if cutoff == Some(0) {
        return Err(CliError::config("cutoff must be positive"));
    }

    let rendered = match cli.command {
        Command::QubitSweep { qmin, qmax, steps } => {
            let sec = file.qubit_sweep.unwrap_or_default();
            let sec = config::SweepSection {
                qmin: qmin.or(sec.qmin),
                qmax: qmax.or(sec.qmax),
                steps: steps.or(sec.steps),
            };
            commands::qubit_sweep(&sec, format.unwrap_or(Format::Csv))?
        }
        Command::Synthesize { target, coupler, kind } => {
            let sec = file.synthesize.unwrap_or_default();
            let target = required(target, sec.target, "target")?;
            let coupler = required(coupler, sec.coupler, "coupler")?;
            commands::synthesize(
                &target,
                &coupler,
                kind.or(sec.kind).as_deref(),
                cutoff.unwrap_or(32),
                format.unwrap_or(Format::Kv),
            )?
        }
        Command::FockRun {
            preset,
            r2,
            eta_d,
            eta_f,
            target_n,
            trips,
            rows,
        } => {
            let sec = file.fock_run.unwrap_or_default();
            let sec = config::FockRunSection {
                preset: sec.preset,
                r2: r2.or(sec.r2),
                eta_d: eta_d.or(sec.eta_d),
                eta_f: eta_f.or(sec.eta_f),
                target_n: target_n.or(sec.target_n),
                trips: trips.or(sec.trips),
                rows: rows.or(sec.rows),
            };
            commands::fock_run(&sec, preset, cutoff, format.unwrap_or(Format::Kv))?
        }
        Command::Yop { coupler, kind, f, g } => {
            let sec = file.yop.unwrap_or_default();
            commands::yop(
                &required(coupler, sec.coupler, "coupler")?,
                kind.or(sec.kind).as_deref(),
                &required(f, sec.f, "f")?,
                &required(g, sec.g, "g")?,
                cutoff.unwrap_or(12),
                format.unwrap_or(Format::Kv),
            )?
        }
        Command::MultiportCheck {
            coupler,
            kind,
            draws,
            seed,
        } => {
            let sec = file.multiport_check.unwrap_or_default();
            commands::multiport_check(
                &sec,
                coupler.as_deref(),
                kind.as_deref(),
                draws,
                seed,
                format.unwrap_or(Format::Kv),
            )?
        }
    };

    output::emit(out.as_deref(), &rendered.text)?;
    if let (Some(_), Some(summary)) = (&out, &rendered.summary) {
        output::emit(None, summary)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e.to_string();
            let first = first.lines().next().unwrap_or("invalid arguments");
            let msg = first.trim_start_matches("error: ");
            eprintln!("{}", CliError::config(msg).line());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.line());
            ExitCode::from(e.code())
        }
    }
}
