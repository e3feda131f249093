fn main() {
    std::process::exit(moire_wells::cli::main_with_args(std::env::args_os()));
}
