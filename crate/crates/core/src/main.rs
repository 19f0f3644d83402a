fn main() {
    std::process::exit(delta_shell::cli::main_with_args(std::env::args_os()));
}
