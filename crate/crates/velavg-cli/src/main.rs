fn main() {
    std::process::exit(velavg_cli::run(std::env::args_os()));
}
