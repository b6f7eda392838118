use std::io::{stderr, stdout};
use std::process::ExitCode;

use clap::Parser;
use cldiam_cli::args::Cli;
use cldiam_cli::error::{EXIT_OK, EXIT_VALIDATION};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            e.print().ok();
            return ExitCode::from(code as u8);
        }
    };
    match cldiam_cli::run(cli, &mut stdout().lock(), &mut stderr().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cldiam: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
