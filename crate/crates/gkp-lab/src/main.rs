fn main() {
    std::process::exit(gkp_lab::run(std::env::args_os()));
}
