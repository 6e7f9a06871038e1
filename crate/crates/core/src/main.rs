fn main() {
    std::process::exit(padix::cli::run(std::env::args_os()));
}
