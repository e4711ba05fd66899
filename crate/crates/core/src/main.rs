fn main() {
    std::process::exit(alignfluct::cli::main_with_args(std::env::args_os()));
}
