//! Runs every acceptance criterion at full size and prints one line each.
//! `CLDIAM_ACCEPTANCE_LEVEL=fast` selects the reduced sizes.

use std::process::ExitCode;

use cldiam_cli::args::Level;
use cldiam_cli::suites::run_suites;

fn main() -> ExitCode {
    let level = match std::env::var("CLDIAM_ACCEPTANCE_LEVEL").as_deref() {
        Ok("fast") => Level::Fast,
        _ => Level::Full,
    };
    // `cargo test -- <filter>` style arguments are accepted and ignored,
    // except `--list`, which test runners use for discovery.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    println!("acceptance suites ({level:?})");
    let outcomes = run_suites(level, &[], |o| println!("{}", o.line()));
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
