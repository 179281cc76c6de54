use std::io::Write;
use std::process::ExitCode;

use bbcd::cli::{error_object, run, Args, RunConfig};
use bbcd::Error;
use clap::Parser;

fn main() -> ExitCode {
    let args = Args::parse();
    let stdout = std::io::stdout();
    let result = RunConfig::from_args(args)
        .and_then(|config| run(&config, &mut stdout.lock(), &mut std::io::stderr()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let _ = writeln!(stdout.lock(), "{}", error_object(&err));
            ExitCode::from(if matches!(err, Error::Config(_)) {
                2
            } else {
                1
            })
        }
    }
}
