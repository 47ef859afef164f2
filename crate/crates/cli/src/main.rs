use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(nisq_scaling_cli::run(std::env::args_os(), &mut std::io::stdout().lock()))
}
