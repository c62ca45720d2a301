//! `rsw`: run scenarios, classify separated solutions and run the verification suites.

mod run;
mod separated;
mod verify;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "rsw", version, about = "Rotating shallow water singularity laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify and integrate a separated solution, or sweep over kappa0.
    Separated(separated::SeparatedArgs),
    /// Execute a scenario config and write its record, snapshots and summary.
    Run(run::RunArgs),
    /// Run the property suites; exits 1 if any check fails.
    Verify(verify::VerifyArgs),
}

/// Bad arguments or configuration: exit status 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn exit_status(e: &anyhow::Error) -> u8 {
    if e.is::<Usage>() {
        return 2;
    }
    match e.downcast_ref::<rsw_core::Error>() {
        Some(rsw_core::Error::InvalidConfig(_) | rsw_core::Error::InvalidArgument(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Separated(args) => separated::cmd_separated(&args),
        Command::Run(args) => run::cmd_run(&args),
        Command::Verify(args) => verify::cmd_verify(&args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_status(&e))
        }
    }
}
