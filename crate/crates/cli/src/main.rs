fn main() {
    std::process::exit(nvcool::run(std::env::args_os()));
}
