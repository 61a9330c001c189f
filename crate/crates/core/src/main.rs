fn main() -> std::process::ExitCode {
    meshplan::cli::main()
}
