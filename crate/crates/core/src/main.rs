fn main() {
    std::process::exit(loscov::cli::main());
}
