fn main() {
    std::process::exit(hytep::cli::run(std::env::args_os()));
}
