use std::process::ExitCode;

use clap::Parser;
use sonon_cli::cli::Cli;

fn main() -> ExitCode {
    // Help, version and usage errors are handled by clap (usage errors exit 2).
    let cli = Cli::parse();
    let result = cli.resolve().and_then(|config| sonon_cli::run(&config));
    match result {
        Ok(manifest) => {
            eprintln!("wrote {} files and manifest.json", manifest.files.len());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("sonon: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
