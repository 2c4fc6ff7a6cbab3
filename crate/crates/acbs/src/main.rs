fn main() {
    std::process::exit(acbs::cli::run(std::env::args_os()));
}
