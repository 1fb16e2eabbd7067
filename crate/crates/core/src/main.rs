fn main() {
    std::process::exit(ptsusy::cli::run(std::env::args_os()));
}
