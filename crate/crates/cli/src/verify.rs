use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Args;
use rsw_core::verify::{verify, Suite};

use crate::Usage;

#[derive(Args)]
pub struct VerifyArgs {
    /// Restrict to one suite: separated, moments, solver or lagrangian.
    #[arg(long)]
    suite: Option<String>,
    /// Also write the JSON result to this file.
    #[arg(long)]
    json: Option<PathBuf>,
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode> {
    let suites = match &args.suite {
        Some(name) => vec![name.parse::<Suite>().map_err(|e| Usage(e.to_string()))?],
        None => Vec::new(),
    };
    let report = verify(&suites);
    let text = serde_json::to_string_pretty(&report)?;
    println!("{text}");
    if let Some(path) = &args.json {
        fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    for (suite, check) in report.failures() {
        eprintln!("FAILED {suite}/{}: {}", check.name, check.detail);
    }
    Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
