fn main() {
    std::process::exit(benders_cuts_cli::run(std::env::args_os()));
}
