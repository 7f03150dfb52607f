use std::io::Write;

use clap::Parser;
use serrelab_cli::{export, render, run, Cli, Command};

fn main() {
    let cli = Cli::parse();
    if let Command::Export { fixture } = cli.command {
        print!("{}", export(fixture));
        return;
    }
    let (results, code) = run(&cli);
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(render(&results, cli.format).as_bytes());
    let _ = out.flush();
    std::process::exit(code);
}
