//! `rolecsp`: batch entry points for hidden-role inference.

mod error;
mod eval;
mod extract;
mod infer;
mod inputs;
mod replay;
mod serve;
mod synth;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub use error::CliError;

#[derive(Parser)]
#[command(name = "rolecsp", version, about = "Hidden-role inference as weighted constraint satisfaction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one game state and print marginals and the MAP assignment.
    Infer(infer::Args),
    /// Replay game records under presets and views, writing a metrics CSV.
    Replay(replay::Args),
    /// Aggregate two metrics CSVs and test the paired differences.
    Eval(eval::Args),
    /// Generate synthetic game records.
    Synth(synth::Args),
    /// Turn a transcript into a constraint document through a chat endpoint.
    Extract(extract::Args),
    /// Run the HTTP session service.
    Serve(serve::Args),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Infer(a) => infer::run(a),
        Command::Replay(a) => replay::run(a),
        Command::Eval(a) => eval::run(a),
        Command::Synth(a) => synth::run(a),
        Command::Extract(a) => extract::run(a),
        Command::Serve(a) => serve::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
