//! Single binary covering the whole pipeline: extract samples from a
//! corpus, build the vocabulary, train, predict, and evaluate.
//!
//! Exit codes: 0 success, 1 user or configuration error, 2 data error
//! (unparseable input, bad graph, I/O), 3 numeric failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use loglevel_core::CoreError;

use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "loglevel", version, about = "Log verbosity level prediction over program graphs")]
struct Cli {
    /// TOML run configuration; command flags override its values.
    #[arg(short, long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract labeled samples from a corpus of Java sources and graph files.
    Extract(commands::extract::ExtractArgs),
    /// Build the subtoken vocabulary from the training split.
    Vocab(commands::vocab::VocabArgs),
    /// Train a model and write the best-validation checkpoint.
    Train(commands::train::TrainArgs),
    /// Predict log levels for sites in sources, graphs, or sample files.
    Predict(commands::predict::PredictArgs),
    /// Score a checkpoint and write report files.
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Print a program graph's composition for debugging.
    InspectGraph(commands::inspect::InspectArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests land here too; they are not errors.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn dispatch(cli: &Cli) -> loglevel_core::Result<()> {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Extract(args) => commands::extract::run(&cfg, args),
        Command::Vocab(args) => commands::vocab::run(&cfg, args),
        Command::Train(args) => commands::train::run(&cfg, args),
        Command::Predict(args) => commands::predict::run(&cfg, args),
        Command::Evaluate(args) => commands::evaluate::run(&cfg, args),
        Command::InspectGraph(args) => commands::inspect::run(args),
    }
}

fn exit_code(e: &CoreError) -> u8 {
    match e {
        CoreError::Config(_) => 1,
        CoreError::Numeric(_) => 3,
        _ => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_kinds_map_to_documented_exit_codes() {
        assert_eq!(exit_code(&CoreError::Config("x".into())), 1);
        assert_eq!(exit_code(&CoreError::Data("x".into())), 2);
        assert_eq!(exit_code(&CoreError::Graph("x".into())), 2);
        assert_eq!(exit_code(&CoreError::Numeric("x".into())), 3);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
