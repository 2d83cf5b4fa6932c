fn main() {
    if let Err(err) = pseudosurv_cli::run() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
