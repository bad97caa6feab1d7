fn main() {
    std::process::exit(useqmine::cli::run(std::env::args_os()));
}
