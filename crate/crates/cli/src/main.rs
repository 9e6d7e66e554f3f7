mod args;
mod commands;
mod report;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;

use args::{Cli, Command};
use report::{emit, render, CliError, CliResult, RunSpec};

const THREADS_VAR: &str = "LOGGAS_THREADS";

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size thread pool: {e}")))
}

fn finish<A: Serialize, B: Serialize>(
    name: &str,
    args: &A,
    report: Option<&Path>,
    body: CliResult<B>,
) -> CliResult<()> {
    let spec = RunSpec {
        subcommand: name,
        version: env!("CARGO_PKG_VERSION"),
        format: "JSON",
        args,
    };
    emit(&render(&body?, &spec)?, report)
}

fn run(cli: &Cli) -> CliResult<()> {
    configure_threads()?;
    let name = cli.command.name();
    match &cli.command {
        Command::Energy(a) => finish(name, a, a.out.report.as_deref(), commands::energy(a)),
        Command::Defect(a) => finish(name, a, a.out.report.as_deref(), commands::defect(a)),
        Command::QlbSweep(a) => finish(name, a, a.out.report.as_deref(), commands::qlb(a)),
        Command::Minimize(a) => finish(name, a, a.report.report.as_deref(), commands::minimize(a)),
        Command::FieldCheck(a) => finish(name, a, a.out.report.as_deref(), commands::field_check(a)),
        Command::Correlate(a) => finish(name, a, a.out.report.as_deref(), commands::correlate(a)),
        Command::Counts(a) => finish(name, a, a.out.report.as_deref(), commands::counts(a)),
        Command::Theorem1Sweep(a) => finish(name, a, a.out.report.as_deref(), commands::theorem1(a)),
        Command::Fekete(a) => finish(name, a, a.out.report.as_deref(), commands::fekete(a)),
        Command::Sample(a) => finish(name, a, a.report.report.as_deref(), commands::sample(a)),
        Command::SweepBeta(a) => finish(name, a, a.out.report.as_deref(), commands::sweep(a)),
    }
}

fn fail(err: &CliError) -> ExitCode {
    let _ = std::io::stderr().write_all(err.to_json().as_bytes());
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => return fail(&CliError::Usage(e.render().to_string().trim_end().to_string())),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
