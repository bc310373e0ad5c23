use std::process::ExitCode;

fn main() -> ExitCode {
    tiledscan_cli::main_with(std::env::args_os())
}
