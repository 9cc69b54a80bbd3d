fn main() {
    std::process::exit(semcom_cli::app::main_with_args(std::env::args_os()));
}
