fn main() {
    std::process::exit(ringjc_cli::main_with_args(std::env::args_os()));
}
