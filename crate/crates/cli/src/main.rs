//! `modcalc`: spectrograms, norms, operators and scenario runs from the shell.

mod args;
mod commands;
mod error;

use clap::Parser;

use args::Cli;

fn main() {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot size the worker pool: {e}");
            std::process::exit(modcalc_harness::exit::CONFIG);
        }
    }
    match commands::run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
