mod args;
mod run;

use args::{Cli, Command};
use clap::{ColorChoice, CommandFactory, FromArgMatches};
use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let mut cmd = Cli::command();
    if std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty()) {
        cmd = cmd.color(ColorChoice::Never);
    }
    let cli = match cmd.try_get_matches().and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { run::INPUT } else { run::PASS });
        }
    };
    let (outcome, format) = match &cli.command {
        Command::Radius(a) => (run::radius(a), a.common.format),
        Command::Norm(a) => (run::norm(a), a.common.format),
        Command::Index(a) => (run::index(a), a.common.format),
        Command::Verify(a) => (run::verify(a), a.common.format),
        Command::Construct(a) => (run::construct(a), a.common.format),
        Command::Describe(a) => (run::describe(a), a.common.format),
    };
    match outcome {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(run::render(&out, format).as_bytes()).is_err() {
                return ExitCode::from(run::FAIL);
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
