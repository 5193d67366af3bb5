fn main() -> std::process::ExitCode {
    qwhittaker::cli::main_with_args(std::env::args_os())
}
