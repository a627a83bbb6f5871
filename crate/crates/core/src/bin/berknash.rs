fn main() {
    std::process::exit(berknash::cli::run(std::env::args_os()));
}
