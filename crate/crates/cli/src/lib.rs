//! Command-line front end for `fourier-ratio`: CSV ingestion, analysis
//! reports, experiment drivers and plot-ready CSV/JSON output.
//!
//! Exit codes: 0 success, 1 usage, 2 input, 3 numerical.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;
pub mod series;

use std::io::Write;

use args::{Cli, Command};
use commands::Context;
use error::CliResult;
use output::Emitter;

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let g = &cli.global;
    let mut ctx = Context {
        emitter: Emitter {
            format: g.format,
            out_dir: g.out_dir.clone(),
            timestamp: !g.no_timestamp,
        },
        seed: g.seed,
        stdout,
    };
    match &cli.command {
        Command::Analyze(a) => commands::analyze(&mut ctx, a),
        Command::Approx(a) => commands::approx(&mut ctx, a),
        Command::Impute(a) => commands::impute_cmd(&mut ctx, a),
        Command::Sweep(a) => commands::sweep(&mut ctx, a),
        Command::Restrict(a) => commands::restrict(&mut ctx, a),
        Command::Constants(a) => commands::constants(&mut ctx, a),
        Command::Noise(a) => commands::noise(&mut ctx, a),
    }
}
