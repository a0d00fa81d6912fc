use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use multidir_cli::{read_config, run, write_outputs, CliError, Command, ExperimentConfig};

/// Derivative estimates, extremal points and mean value witnesses, with
/// independent verification of every conclusion.
#[derive(Parser, Debug)]
#[command(name = "multidir", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for the report, timings and traces.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// RNG seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Value tolerance; derivative checks use 1000 times this.
    #[arg(long)]
    tol: Option<f64>,
    /// Sampling refinement for bodies and intervals.
    #[arg(long)]
    grid: Option<usize>,
}

fn configure(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut c = match &cli.config {
        Some(path) => read_config(path)?,
        None => ExperimentConfig::new(cli.command),
    };
    match c.command {
        Some(cmd) if cmd != cli.command => {
            return Err(CliError::Usage(format!(
                "config is for {:?}, command line asks for {:?}",
                cmd.name(),
                cli.command.name()
            )))
        }
        _ => c.command = Some(cli.command),
    }
    if let Some(s) = cli.seed {
        c.seed = s;
    }
    if let Some(t) = cli.tol {
        c.tol = t;
    }
    if let Some(g) = cli.grid {
        c.grid = g;
    }
    Ok(c)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { multidir_cli::EXIT_USAGE } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    let result = configure(&cli).and_then(|c| {
        let out = run(&c)?;
        write_outputs(&cli.out, &out)?;
        Ok(out)
    });
    match result {
        Ok(out) => {
            let r = &out.report;
            if let Some(multidir_cli::report::Outcome::Suite { report }) = &r.outcome {
                print!("{}", report.summary_text());
            }
            if let Some(e) = &r.error {
                eprintln!("{}: {}", e.kind, e.message);
            }
            for c in r.failed_checks() {
                eprintln!("FAILED {}: {}", c.name, c.detail);
            }
            println!(
                "{} {} ({} checks, {:.2}s)",
                r.command,
                if r.verified { "verified" } else { "NOT verified" },
                r.checks.len(),
                out.timings.total_seconds
            );
            ExitCode::from(r.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
