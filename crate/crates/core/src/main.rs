fn main() {
    std::process::exit(fock_lab::cli::run(std::env::args_os()));
}
