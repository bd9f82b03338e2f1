use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = squid_cli::run(std::env::args_os());
    ExitCode::from(outcome.exit_code)
}
