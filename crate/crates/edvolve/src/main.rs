use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(edvolve::cli::run() as u8)
}
