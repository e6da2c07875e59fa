fn main() {
    std::process::exit(simplicial::cli::main_with_std());
}
