fn main() -> std::process::ExitCode {
    qrs::cli::main()
}
