use clap::Parser;
use kissing::cli::{run, RunConfig};

fn main() {
    let out = run(&RunConfig::parse());
    print!("{}", out.report);
    std::process::exit(out.code);
}
