fn main() {
    std::process::exit(dcell_paths::cli::run());
}
