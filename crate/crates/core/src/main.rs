fn main() {
    std::process::exit(qaxioms::cli::main());
}
