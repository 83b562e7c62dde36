fn main() {
    std::process::exit(dotqip_cli::execute(std::env::args_os()));
}
