fn main() {
    std::process::exit(grafhub::cli::run_cli(std::env::args_os()));
}
