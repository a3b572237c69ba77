use std::process::ExitCode;

fn main() -> ExitCode {
    mvgraph::cli::main()
}
