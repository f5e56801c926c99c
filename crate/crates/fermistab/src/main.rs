fn main() {
    std::process::exit(fermistab::cli::main());
}
