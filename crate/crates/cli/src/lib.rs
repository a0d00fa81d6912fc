//! Batch front-end for the `multidir` toolkit: experiment configuration,
//! single-problem runs, the catalog suite, and report and trace emission.

// `!(x <= y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod report;
pub mod run;
pub mod suite;

use std::fs;
use std::path::Path;

pub use config::{BodySpec, Command, ExperimentConfig, FunctionSpec, OutputPaths};
pub use report::{Check, RunReport};
pub use run::{run, RunOutput};
pub use suite::{run_suite, SuiteReport};

/// Exit status for a usage or parse error.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_USAGE
    }
}

pub fn read_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ExperimentConfig::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Writes the report, timings and whichever CSV traces the run produced.
pub fn write_outputs(dir: &Path, out: &RunOutput) -> Result<(), CliError> {
    let paths = &out.report.config.output;
    let write = |name: &str, text: &str| {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })
    };
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    write(&paths.report, &out.report.to_json())?;
    let timings = serde_json::to_string_pretty(&out.timings).expect("timings serialize") + "\n";
    write(&paths.timings, &timings)?;
    let tables = [
        (&out.trace, &paths.trace),
        (&out.orbit, &paths.orbit),
        (&out.bridge, &paths.bridge),
        (&out.suite, &paths.suite),
    ];
    for (table, name) in tables {
        if let Some(t) = table {
            let csv = t
                .to_csv()
                .map_err(|e| CliError::Usage(format!("{name}: {e}")))?;
            write(name, &csv)?;
        }
    }
    Ok(())
}
