fn main() {
    std::process::exit(lopsp_forge::cli::run(std::env::args_os()));
}
