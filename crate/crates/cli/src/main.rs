use clap::Parser;

use mrpi_cli::args::{run, Cli};
use mrpi_cli::failure::exit_code;

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(&cli) {
        eprintln!("error: {err:#}");
        std::process::exit(exit_code(&err));
    }
}
