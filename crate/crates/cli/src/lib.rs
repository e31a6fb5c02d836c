//! Library backing the `advice-games` binary: game/strategy file formats,
//! run reports, Monte Carlo simulation, and the command handlers.
//!
//! Exit codes: 0 on success (or a positive equilibrium verdict), 1 when a
//! verification verdict is negative, 2 on validation errors, 3 on solver
//! failures.

pub mod commands;
pub mod gamefile;
pub mod report;
pub mod sim;
pub mod strategyfile;

use clap::Parser;

use commands::{error_exit_code, execute, Cli, Command, Format};
use report::Results;

/// Parses the process arguments, runs the command, prints the report, and
/// returns the exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    run_cli(&cli, &mut std::io::stdout())
}

/// Runs a parsed invocation, writing the report to `out`.
pub fn run_cli(cli: &Cli, out: &mut dyn std::io::Write) -> i32 {
    match execute(cli) {
        Ok(report) => {
            // `catalog --export` prints the raw game file rather than a
            // report wrapper.
            if let (Command::Catalog { export: Some(_) }, Results::Catalog { games }) =
                (&cli.command, &report.results)
            {
                let _ = writeln!(out, "{}", games[0].notes);
                return 0;
            }
            let text = match cli.format {
                Format::Json => report.to_json(),
                Format::Human => report.to_human(),
            };
            let _ = writeln!(out, "{text}");
            report.exit_code()
        }
        Err(error) => {
            let _ = writeln!(out, "error: {error}");
            error_exit_code(&error)
        }
    }
}
