fn main() {
    if let Err(e) = isostat::configure_threads_from_env() {
        eprintln!("{e}");
        std::process::exit(2);
    }
    let code = isostat::cli::run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
