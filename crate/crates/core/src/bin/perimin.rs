fn main() {
    std::process::exit(perimin::cli::run(std::env::args_os()));
}
