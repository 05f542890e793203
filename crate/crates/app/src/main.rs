fn main() {
    std::process::exit(stv_app::cli::run());
}
