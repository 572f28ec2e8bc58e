use std::process::ExitCode;

fn main() -> ExitCode {
    vgmfeat::cli::main_with_args(std::env::args_os())
}
