fn main() {
    std::process::exit(regcompress::cli::run(std::env::args_os()));
}
