fn main() {
    std::process::exit(meanbounds::cli::run(std::env::args_os()));
}
