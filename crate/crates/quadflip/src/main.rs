fn main() {
    std::process::exit(quadflip::cli::run());
}
