fn main() {
    std::process::exit(ferrers_toric::cli::run());
}
