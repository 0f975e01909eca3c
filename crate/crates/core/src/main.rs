fn main() {
    std::process::exit(voros_core::cli::run(std::env::args_os()));
}
