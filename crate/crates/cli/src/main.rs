use std::process::ExitCode;

use clap::Parser;

use fhj_cli::{configure_threads, run, Cli, THREADS_ENV};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = std::env::var(THREADS_ENV).ok();
    let outcome = configure_threads(threads.as_deref()).and_then(|()| run(cli));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fhj: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
