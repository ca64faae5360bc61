use std::process::ExitCode;

fn main() -> ExitCode {
    decolab::cli::main()
}
