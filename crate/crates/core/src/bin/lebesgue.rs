fn main() {
    std::process::exit(lebesgue_toolkit::cli::main_with_args(std::env::args_os()));
}
