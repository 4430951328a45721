fn main() {
    std::process::exit(mediumband::cli::run(std::env::args_os()));
}
