fn main() {
    std::process::exit(lmnet::cli::main_with_args(std::env::args_os()));
}
