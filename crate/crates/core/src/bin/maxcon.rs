fn main() {
    std::process::exit(bmf_maxcon::cli::run(std::env::args_os()));
}
