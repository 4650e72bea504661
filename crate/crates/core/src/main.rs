fn main() {
    std::process::exit(cellarith::cli::main_with_args(std::env::args_os()));
}
