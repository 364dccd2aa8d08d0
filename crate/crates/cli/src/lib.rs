//! Command-line front end for the `discreg` registration engine.

pub mod args;
pub mod commands;
pub mod config;
pub mod manifest;

use anyhow::Result;

use args::{Cli, Command};

/// Runs one parsed invocation inside a pool of `--jobs` workers.
pub fn run(cli: &Cli) -> Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        builder = builder.num_threads(jobs as usize);
    }
    let pool = builder.build()?;
    pool.install(|| match &cli.command {
        Command::Register(a) => commands::cmd_register(a),
        Command::Features(a) => commands::cmd_features(a),
        Command::Evaluate(a) => commands::cmd_evaluate(a),
        Command::Batch(a) => commands::cmd_batch(a),
        Command::Synth(a) => commands::cmd_synth(a),
    })
}
