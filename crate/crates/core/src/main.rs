fn main() -> std::process::ExitCode {
    xy_spectral::cli::main_entry()
}
