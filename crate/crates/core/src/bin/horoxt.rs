fn main() {
    std::process::exit(horoxt::cli::main_exit_code());
}
