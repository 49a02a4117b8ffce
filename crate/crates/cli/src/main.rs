use clap::Parser;
use pathkernel_cli::commands::{run, Cli};

fn main() {
    // Flag-level problems exit through clap with the usual usage code (2);
    // everything past parsing maps through CliError's own exit codes.
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
