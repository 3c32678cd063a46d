fn main() {
    std::process::exit(ife1d::cli::main_with_args(std::env::args_os()));
}
