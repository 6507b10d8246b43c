fn main() {
    std::process::exit(covmat::cli::main_with_args(std::env::args_os()));
}
