use std::process::ExitCode;

fn main() -> ExitCode {
    c1vem::cli::run(std::env::args_os())
}
