use std::io::Read;
use std::process::ExitCode;

use clap::Parser;
use powgroup_cli::{run, wants_stdin, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut input = String::new();
    if wants_stdin(&cli) {
        if let Err(e) = std::io::stdin().read_to_string(&mut input) {
            eprintln!("cannot read standard input: {e}");
            return ExitCode::from(2);
        }
    }
    let (code, out) = run(cli, &input);
    print!("{out}");
    ExitCode::from(code as u8)
}
