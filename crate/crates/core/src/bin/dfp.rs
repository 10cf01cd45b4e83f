fn main() {
    std::process::exit(dfp_core::harness::cli::run(std::env::args()));
}
