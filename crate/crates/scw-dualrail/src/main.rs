//! Thin binary entry point for the dataset CLI.

fn main() {
    env_logger::init();
    std::process::exit(scw_dualrail::cli::run());
}
