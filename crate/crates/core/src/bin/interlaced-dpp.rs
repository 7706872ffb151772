fn main() {
    std::process::exit(interlaced_dpp::cli::run(std::env::args_os()));
}
