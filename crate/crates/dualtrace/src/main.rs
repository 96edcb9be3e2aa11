use clap::Parser;

use dualtrace::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("dualtrace: {}", e.message);
        std::process::exit(e.code);
    }
}
