fn main() {
    std::process::exit(sinai_core::cli::run(std::env::args_os()));
}
