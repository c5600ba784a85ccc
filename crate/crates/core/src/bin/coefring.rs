use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use coefring::cli::{env_settings, run, Cli, JobConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = env_settings().and_then(|(threads, budget)| {
        let config = JobConfig::from_cli(cli, budget)?;
        coefring::par::with_threads(threads, || run(&config))
    });
    match result {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(outcome.stdout.as_bytes());
            let _ = stdout.flush();
            for d in &outcome.diagnostics {
                eprintln!("{d}");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
