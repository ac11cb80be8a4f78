fn main() {
    std::process::exit(corrhist::cli::run(std::env::args_os()));
}
