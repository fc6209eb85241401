fn main() {
    std::process::exit(cli_runner::run(std::env::args_os()));
}
