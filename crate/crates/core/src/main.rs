use clap::Parser;
use spherefree::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
