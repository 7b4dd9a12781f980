mod args;
mod commands;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use nhsim_core::Error;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = args::Cli::parse();
    let mut out = io::stdout().lock();
    let result = commands::dispatch(cli.command, &mut out);
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                Error::InvalidConfig(fields) => {
                    eprintln!("error: invalid config");
                    for f in fields {
                        eprintln!("  {f}");
                    }
                }
                other => eprintln!("error: {other}"),
            }
            ExitCode::from(1)
        }
    }
}
