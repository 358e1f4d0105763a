fn main() {
    std::process::exit(unruh_coherence::cli::main_with_args(std::env::args_os()));
}
