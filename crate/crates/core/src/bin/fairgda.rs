fn main() -> std::process::ExitCode {
    fairgda::cli::main()
}
