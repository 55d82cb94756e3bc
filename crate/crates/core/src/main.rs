fn main() {
    std::process::exit(leeyang::cli::run(std::env::args_os()));
}
