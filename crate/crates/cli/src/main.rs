fn main() {
    std::process::exit(qsc_cli::run(std::env::args_os()));
}
