fn main() {
    std::process::exit(resist_cli::main_with(std::env::args_os()));
}
