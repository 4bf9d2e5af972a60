fn main() {
    std::process::exit(mixmean::cli::run());
}
