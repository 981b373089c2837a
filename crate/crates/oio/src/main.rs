fn main() {
    std::process::exit(oio::cli::run(std::env::args_os()));
}
