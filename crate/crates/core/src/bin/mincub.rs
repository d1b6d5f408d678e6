fn main() {
    std::process::exit(mincub::cli::run(std::env::args_os()));
}
