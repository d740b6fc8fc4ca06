use clap::Parser;
use motive_periods_cli::{execute, Cli, CommandRequest};

fn main() {
    let cli = Cli::parse();
    let code = match CommandRequest::from_cli(cli) {
        Ok(req) => execute(&req),
        Err(msg) => {
            eprintln!("{msg}");
            2
        }
    };
    std::process::exit(code);
}
