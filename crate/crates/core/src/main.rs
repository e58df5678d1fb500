fn main() {
    std::process::exit(aqt::cli::run(std::env::args()));
}
