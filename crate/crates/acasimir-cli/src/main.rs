fn main() {
    std::process::exit(acasimir_cli::run_cli(std::env::args_os()));
}
