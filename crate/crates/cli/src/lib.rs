//! Command-line driver: config parsing, subcommand dispatch and run manifests.

pub mod cli;
pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, RunConfig, SubcommandName};
pub use error::CliError;
pub use output::RunManifest;
pub use run::run;

/// Parses `args` (including the program name) and runs the subcommand.
pub fn execute<I, T>(args: I) -> Result<RunManifest, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = cli::Cli::try_parse_from(args).map_err(|e| CliError::Config(e.to_string()))?;
    run(&cli.resolve()?)
}
