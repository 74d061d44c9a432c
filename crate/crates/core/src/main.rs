fn main() {
    std::process::exit(minflex::cli::main_with_args(std::env::args_os()));
}
