fn main() {
    std::process::exit(yorkl::cli::run(std::env::args_os()));
}
