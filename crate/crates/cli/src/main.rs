fn main() {
    std::process::exit(bpk::run(std::env::args_os()));
}
