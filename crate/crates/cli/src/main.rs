fn main() {
    std::process::exit(rmatrix_cli::main_with_args(std::env::args_os()));
}
