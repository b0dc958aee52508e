fn main() {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    std::process::exit(imcf_soliton::cli::run_args(&argv));
}
