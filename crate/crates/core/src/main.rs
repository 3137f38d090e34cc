fn main() {
    std::process::exit(rw_tradeoff::cli::run(std::env::args_os()));
}
