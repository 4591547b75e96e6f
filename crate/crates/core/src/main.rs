fn main() {
    std::process::exit(ideal_moments::cli::run());
}
