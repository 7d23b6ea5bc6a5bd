fn main() {
    std::process::exit(poncelet_app::run(std::env::args_os()));
}
