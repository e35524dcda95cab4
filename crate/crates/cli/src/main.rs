fn main() {
    std::process::exit(qppkit_cli::run(std::env::args_os()));
}
