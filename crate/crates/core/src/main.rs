fn main() {
    std::process::exit(unitalforge::cli::main_entry());
}
