fn main() {
    std::process::exit(lgt_cli::run(std::env::args_os()));
}
