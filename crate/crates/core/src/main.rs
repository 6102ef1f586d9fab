fn main() {
    std::process::exit(cavitas::cli::main_with_args(std::env::args_os()));
}
