use std::process::ExitCode;

fn main() -> ExitCode {
    kpz_tail::cli::run(std::env::args_os())
}
