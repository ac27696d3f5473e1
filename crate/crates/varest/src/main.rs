use std::process::ExitCode;

fn main() -> ExitCode {
    varest::cli::main()
}
