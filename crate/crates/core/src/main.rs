use std::process::ExitCode;

fn main() -> ExitCode {
    bandchol::cli::main()
}
