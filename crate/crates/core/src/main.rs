fn main() {
    std::process::exit(avc_list::cli::run(std::env::args_os()));
}
