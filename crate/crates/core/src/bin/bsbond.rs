use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = bsbond::cli::Cli::parse();
    let code = bsbond::cli::run(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr());
    ExitCode::from(code)
}
