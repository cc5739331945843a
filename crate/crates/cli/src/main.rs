mod cli;
mod commands;
mod manifest;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use cli::{Cli, Command};
use commands::UsageError;

/// Exit status for a failed command: 2 usage, 3 no peak, 4 resource, 1 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<hanoiwalk::Error>() {
        Some(hanoiwalk::Error::Domain(_)) => 2,
        Some(hanoiwalk::Error::NoPeak { .. }) => 3,
        Some(hanoiwalk::Error::Resource(_)) => 4,
        _ => 1,
    }
}

fn init_logging(quiet: bool) {
    let level = if quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format(|buf, record| writeln!(buf, "{}: {}", record.level(), record.args()))
        .init();
}

fn init_workers(workers: Option<usize>) -> anyhow::Result<usize> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    match workers {
        Some(0) => return Err(UsageError("--workers must be >= 1".into()).into()),
        Some(w) => builder = builder.num_threads(w),
        None => {}
    }
    builder.build_global()?;
    Ok(rayon::current_num_threads())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let workers = init_workers(cli.workers)?;
    match &cli.command {
        Command::Simulate(a) => commands::simulate(a, workers),
        Command::Sweep(a) => commands::sweep(a, workers),
        Command::Scale(a) => commands::scale(a, workers),
        Command::Density(a) => commands::density(a, workers),
        Command::Fit(a) => commands::fit(a, workers),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(cli.quiet);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
