fn main() {
    std::process::exit(edudesire::cli::main_with_args(std::env::args_os()));
}
