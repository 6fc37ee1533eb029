fn main() -> std::process::ExitCode {
    vqlab::cli::main_entry()
}
