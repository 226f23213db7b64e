use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use higs_ni_cli::cli::{Cli, Command};
use higs_ni_cli::{commands, CmdError};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(64);
        }
    };
    let result = match &cli.command {
        Command::VerifyNi(args) => commands::verify_ni(args),
        Command::SynthY(args) => commands::synth_y(args),
        Command::DfBode(args) => commands::df_bode(args),
        Command::Certify(args) => commands::certify(args),
        Command::Sweep(args) => commands::sweep(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::Reproduce(args) => commands::reproduce(args),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("{err}");
            match err {
                CmdError::Usage(_) => ExitCode::from(64),
                CmdError::Data(_) => ExitCode::from(65),
                CmdError::Chattering => ExitCode::from(4),
            }
        }
    }
}
