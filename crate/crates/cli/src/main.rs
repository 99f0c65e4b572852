use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(qnd_cli::run_cli(std::env::args_os()))
}
