fn main() {
    std::process::exit(qal_cli::dispatch(std::env::args_os()));
}
