fn main() {
    std::process::exit(sparse_meta::cli::run(std::env::args_os()));
}
