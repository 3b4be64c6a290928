fn main() {
    std::process::exit(fogplace::cli::run_from_args(std::env::args_os()));
}
