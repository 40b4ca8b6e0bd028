fn main() {
    std::process::exit(te_lab::cli::main_with_args(std::env::args().collect()));
}
