fn main() {
    std::process::exit(entrobound::harness::cli::main_with_args(std::env::args_os()));
}
