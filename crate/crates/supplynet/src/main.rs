fn main() -> std::process::ExitCode {
    supplynet::cli::main()
}
