fn main() {
    std::process::exit(derham::main_with_args(std::env::args_os()));
}
