fn main() {
    std::process::exit(emtor::cli::run(std::env::args_os()));
}
