fn main() {
    std::process::exit(cmrep_cli::cli::run());
}
