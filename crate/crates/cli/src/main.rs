fn main() {
    std::process::exit(wrlat::run(std::env::args().collect()));
}
