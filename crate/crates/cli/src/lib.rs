//! Library side of the `stackelberg` command: option resolution, the
//! commands themselves, and CSV / JSON output.

pub mod config;
pub mod error;
pub mod record;
pub mod run;

pub use config::{Cli, RunConfig};
pub use error::{CliError, Result};
pub use run::{execute, Outcome};

/// Renders `outcome` in the configured format.
pub fn render(config: &RunConfig, outcome: &Outcome) -> Result<String> {
    match config.format {
        config::Format::Csv => record::to_csv(&outcome.records),
        config::Format::Json => record::to_json(config, &outcome.records, outcome.grid),
    }
}
