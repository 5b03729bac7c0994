fn main() {
    std::process::exit(spir::cli::run(std::env::args_os()));
}
