fn main() -> std::process::ExitCode {
    ipsf::cli::run()
}
