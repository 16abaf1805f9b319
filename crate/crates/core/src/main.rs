fn main() {
    std::process::exit(brainsym::cli::run(std::env::args_os()));
}
