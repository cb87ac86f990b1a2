fn main() {
    std::process::exit(shapelab_cli::run(std::env::args_os()));
}
