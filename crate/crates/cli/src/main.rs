use std::process::ExitCode;

use bargmann_cli::report::ReportBody;
use bargmann_cli::{emit_report, run_experiment, Cli, CliError};
use clap::Parser;

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = cli.resolve()?;
    let report = run_experiment(&cfg)?;
    if let ReportBody::Propagate(p) = &report.body {
        for w in &p.warnings {
            eprintln!("warning: {w}");
        }
    }
    emit_report(&report, cfg.format, cli.output.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("E_CONFIG: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.line());
            ExitCode::from(1)
        }
    }
}
