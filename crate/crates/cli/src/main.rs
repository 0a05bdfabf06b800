//! Binary entry point; all logic lives in the library for testability.

fn main() {
    std::process::exit(hoiplan_cli::run(std::env::args_os()));
}
