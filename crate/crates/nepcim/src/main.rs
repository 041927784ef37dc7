fn main() {
    std::process::exit(nepcim::cli::run(std::env::args_os()));
}
