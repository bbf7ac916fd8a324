fn main() -> std::process::ExitCode {
    gradun::cli::main()
}
