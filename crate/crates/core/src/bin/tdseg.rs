fn main() {
    std::process::exit(tdseg::cli::main(std::env::args_os()));
}
