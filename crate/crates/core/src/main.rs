fn main() {
    std::process::exit(tempered::cli::run(std::env::args_os()));
}
