fn main() {
    std::process::exit(edap::harness::run_cli(std::env::args_os()));
}
