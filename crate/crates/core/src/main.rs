fn main() {
    std::process::exit(tasep::cli::main());
}
