fn main() {
    std::process::exit(dek::cli::run());
}
