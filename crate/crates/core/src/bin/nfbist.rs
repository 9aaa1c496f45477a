fn main() {
    std::process::exit(nfbist::cli::run(std::env::args_os()));
}
