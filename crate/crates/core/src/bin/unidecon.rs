fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(unidecon::cli::run(&args));
}
