use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(farsight::cli::run(std::env::args_os()))
}
