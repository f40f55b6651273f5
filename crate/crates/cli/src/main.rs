mod args;
mod report;
mod run;

use std::fs;
use std::panic;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Format};
use report::CliError;

const WORKERS_ENV: &str = "ALEXCOVER_WORKERS";

fn configure_workers() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Validation(format!("{WORKERS_ENV}: expected a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Internal(e.to_string()))
}

fn execute(cli: &Cli) -> Result<bool, CliError> {
    configure_workers()?;
    let report = run::run(cli)?;
    let text = match cli.opts.format {
        Format::Json => report::emit_json(&report),
        Format::Table => report::emit_table(&report),
    };
    match &cli.opts.output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    let breaches = report.breaches();
    for c in &breaches {
        eprintln!("check failed: {}: {}", c.name, c.detail);
    }
    Ok(breaches.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    panic::set_hook(Box::new(|info| eprintln!("internal error: {info}")));
    match panic::catch_unwind(|| execute(&cli)) {
        Ok(Ok(true)) => ExitCode::SUCCESS,
        Ok(Ok(false)) => ExitCode::from(3),
        Ok(Err(e)) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
        Err(_) => ExitCode::from(3),
    }
}
