fn main() {
    std::process::exit(rectpierce_cli::main_with_args(std::env::args_os()));
}
