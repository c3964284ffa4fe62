fn main() -> std::process::ExitCode {
    rqmcf::cli::main()
}
