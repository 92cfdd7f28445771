mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Misuse detected after argument parsing, e.g. a flag combination that
/// cannot work. Exits like a clap error.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// 2 for usage and parameter errors, 1 for everything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<histspec::Error>() {
            if matches!(
                e,
                histspec::Error::InvalidP(_)
                    | histspec::Error::InvalidParams { .. }
                    | histspec::Error::InvalidSigma(_)
            ) {
                return 2;
            }
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let result = match cli.command {
        Command::Specify(args) => commands::specify(args),
        Command::Quantile(args) => commands::quantile(args),
        Command::Compare(args) => commands::compare(args),
        Command::ImageDemo(args) => commands::image_demo(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
