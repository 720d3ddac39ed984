fn main() {
    std::process::exit(cfmac_cli::run(std::env::args_os()));
}
