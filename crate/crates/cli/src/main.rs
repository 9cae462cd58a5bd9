mod args;
mod commands;
mod error;
mod output;
mod source;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliResult;

fn run(cli: &Cli) -> CliResult<()> {
    let out = match &cli.command {
        Command::Entropy(a) => commands::entropy(a)?,
        Command::Typical(a) => commands::typical(cli, a)?,
        Command::Di(a) => commands::di(a)?,
        Command::OptimizeDi(a) => commands::optimize(cli, a)?,
        Command::Bounds(a) => commands::bounds(cli, a)?,
        Command::Simulate(a) => {
            let (out, summary) = commands::simulate(cli, a)?;
            if let Some(path) = &a.summary {
                output::write_to(Some(path), &output::render_json(cli, &summary))?;
            }
            out
        }
    };
    output::write_to(cli.output.as_deref(), &output::render(cli, &out)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}: {} error: {e}", output::TOOL, cli.command.name());
            ExitCode::from(e.exit_code())
        }
    }
}
