use std::process::ExitCode;

use clap::Parser;

mod cli;
mod commands;
mod error;
mod input;
mod output;
mod simulate;

use cli::{Cli, Command};

fn run(cli: &Cli) -> error::Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| error::CliError::Usage(format!("--threads: {e}")))?;
    }
    match &cli.command {
        Command::Fit(args) => commands::fit(args),
        Command::Cv(args) => commands::cv(args),
        Command::Compare(args) => commands::compare(args),
        Command::Simulate(args) => simulate::simulate(args),
        Command::CompareWeights(args) => commands::compare_weights(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
