fn main() {
    std::process::exit(treepath::cli::run(std::env::args_os()));
}
