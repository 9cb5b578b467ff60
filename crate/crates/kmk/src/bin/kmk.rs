fn main() {
    std::process::exit(kmk::cli::main_entry());
}
