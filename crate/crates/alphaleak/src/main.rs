fn main() {
    std::process::exit(alphaleak::cli::run(std::env::args_os()));
}
