use clap::Parser;

fn main() {
    let args = descent_kit::cli::Args::parse();
    std::process::exit(descent_kit::cli::main_with(args));
}
