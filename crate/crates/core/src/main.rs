fn main() {
    std::process::exit(peppf::cli::main_with_args(std::env::args_os()));
}
