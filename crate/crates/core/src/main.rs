fn main() {
    std::process::exit(reachop::cli::run(std::env::args_os()));
}
