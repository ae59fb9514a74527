fn main() {
    std::process::exit(qhorder::cli::run(std::env::args_os()));
}
