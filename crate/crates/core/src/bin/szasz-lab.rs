fn main() -> std::process::ExitCode {
    szasz_lab::cli::main()
}
