use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = signfree::cli::run_command(std::env::args());
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(outcome.code as u8)
}
