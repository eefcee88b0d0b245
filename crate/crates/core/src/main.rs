fn main() {
    std::process::exit(oscdict::cli::run(std::env::args_os()));
}
