use clap::Parser;
use lifted_spectrum::cli::{run, Cli};

fn main() {
    std::process::exit(run(&Cli::parse()));
}
