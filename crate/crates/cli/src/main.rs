fn main() {
    std::process::exit(mwca_cli::run_cli(std::env::args_os()));
}
