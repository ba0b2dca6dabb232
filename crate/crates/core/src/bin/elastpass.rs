fn main() {
    elastpass::cli::init_logging();
    std::process::exit(elastpass::cli::run(std::env::args_os()));
}
