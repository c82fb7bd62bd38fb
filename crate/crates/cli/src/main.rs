use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = kwb_cli::Cli::parse();
    let (out, code) = kwb_cli::run(&cli);
    if code == kwb_cli::EXIT_INPUT {
        eprint!("{out}");
    } else {
        let _ = std::io::stdout().write_all(out.as_bytes());
    }
    ExitCode::from(code as u8)
}
