use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(fareylab::run(std::env::args_os()))
}
