fn main() {
    let out = hpt::cli::run(std::env::args_os());
    print!("{}", out.stdout);
    std::process::exit(out.code);
}
