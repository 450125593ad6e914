fn main() {
    std::process::exit(qie_cli::app::run(std::env::args_os()));
}
