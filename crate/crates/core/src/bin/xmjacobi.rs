fn main() {
    std::process::exit(xmjacobi::runner::main_with_env());
}
