fn main() {
    gentle_deq::init_logging();
    let code = gentle_deq::run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
