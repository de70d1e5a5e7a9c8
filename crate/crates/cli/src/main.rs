//! `hecke-cells`: queries and bounded verification runs on the command line.
//!
//! Exit codes: 0 when every selected check passes, 1 when a check fails or
//! stays inconclusive, 2 on bad input or configuration, 3 when something
//! lies outside the computed ball, 4 on filesystem errors.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::config::{Cli, RunConfig};

/// An error that ends the run with a specific exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(message: String) -> Self {
        Self { code: 2, message }
    }

    pub fn out_of_ball(message: String) -> Self {
        Self { code: 3, message }
    }

    pub fn fs(message: String) -> Self {
        Self { code: 4, message }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = RunConfig::resolve(&cli.flags, &cli.command)
        .and_then(|cfg| commands::run(&cfg, &cli.command));
    match run {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
