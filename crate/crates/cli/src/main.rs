use clap::error::ErrorKind;
use clap::Parser;

use eiskit_cli::args::Cli;
use eiskit_cli::{main_with, Failure};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => Failure::USAGE,
            };
            e.print().expect("write usage");
            std::process::exit(code);
        }
    };
    std::process::exit(main_with(cli));
}
