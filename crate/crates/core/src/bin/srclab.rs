fn main() {
    std::process::exit(srclab::frontend::cli_main(std::env::args_os()));
}
