use std::io::Write;

use clap::Parser;
use qpcone::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let output = run(&cli);
    if output.code == qpcone::cli::EXIT_ERROR {
        eprint!("{}", output.text);
    } else {
        let _ = std::io::stdout().write_all(output.text.as_bytes());
    }
    std::process::exit(output.code);
}
