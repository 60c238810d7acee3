fn main() {
    std::process::exit(rehab_core::cli::main_with_args(std::env::args_os()));
}
