fn main() {
    std::process::exit(amo_cli::run(std::env::args_os()));
}
