fn main() {
    std::process::exit(erwhex::cli::main_with_args(std::env::args_os()));
}
