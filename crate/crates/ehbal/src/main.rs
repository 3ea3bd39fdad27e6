use std::process::ExitCode;

use clap::Parser;
use ehbal::cli::{run, Cli};

fn main() -> ExitCode {
    // clap exits with 2 on bad arguments; here 2 is reserved for non-convergence.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprint!("cli::parse_args: {}", e.render());
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
