use clap::Parser;
use quasimle::cli::{run, RunConfig};

fn main() {
    let outcome = run(&RunConfig::parse());
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    std::process::exit(outcome.code);
}
