fn main() {
    std::process::exit(hyperfactor::cli::run_from(std::env::args_os()));
}
