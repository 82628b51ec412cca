fn main() {
    std::process::exit(efsched::cli::run(std::env::args_os()));
}
