use clap::Parser;

fn main() {
    std::process::exit(chaoslab::cli::main_with(chaoslab::cli::Args::parse()));
}
