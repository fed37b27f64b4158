fn main() -> std::process::ExitCode {
    stable_field_lab::cli::main()
}
