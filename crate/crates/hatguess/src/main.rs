fn main() {
    std::process::exit(hatguess::cli::run(std::env::args_os()));
}
