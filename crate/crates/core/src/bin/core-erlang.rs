fn main() {
    std::process::exit(core_erlang::cli::main_with_args(std::env::args_os()));
}
