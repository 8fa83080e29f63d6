fn main() {
    std::process::exit(ergo_xcli::cli::run(std::env::args_os()));
}
