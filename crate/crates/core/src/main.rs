fn main() {
    let out = qadd::cli::run(std::env::args_os());
    println!("{}", out.stdout);
    std::process::exit(out.code);
}
