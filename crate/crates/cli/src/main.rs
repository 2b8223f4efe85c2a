fn main() {
    std::process::exit(l2plus_cli::run(std::env::args_os()));
}
