fn main() {
    std::process::exit(shrinkage_cs::cli::run(std::env::args_os()));
}
