fn main() {
    std::process::exit(modcone::cli::main_with_args(std::env::args().collect()));
}
