fn main() {
    std::process::exit(diagdensity::cli::run(std::env::args_os()));
}
