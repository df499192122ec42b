fn main() {
    std::process::exit(magnon_ep::cli::run_cli(std::env::args_os()));
}
