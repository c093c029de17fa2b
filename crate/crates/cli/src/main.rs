mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fibgrowth_core::Error;

/// Normal forms, growth, quotients and verification for the Fibonacci automaton semigroup.
#[derive(Parser, Debug)]
#[command(name = "fibgrowth", version, about)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Apply a word of states to an input word.
    Act {
        /// Machine definition file (defaults to the bundled automaton).
        #[arg(long)]
        machine: Option<PathBuf>,
        /// States applied left to right, e.g. `fs`.
        states: String,
        /// Input letters as digits, e.g. `0110`.
        input: String,
    },
    /// Print the normal form and length of a word.
    Normalize { word: String },
    /// Rewrite a word to normal form.
    Reduce {
        word: String,
        /// Print every rewrite step.
        #[arg(long)]
        trace: bool,
    },
    /// Exact ball sizes and the growth bounds.
    Growth {
        #[arg(long, default_value_t = 1000)]
        max_length: u64,
        /// Comma-separated lengths to report (defaults to powers of ten and the maximum).
        #[arg(long, value_delimiter = ',')]
        checkpoints: Vec<u64>,
    },
    /// Enumerate the level-n quotient.
    Wn {
        #[arg(long)]
        level: u32,
        /// Also check the defining relations.
        #[arg(long)]
        verify: bool,
    },
    /// Exact and empirical trace of an element.
    Trace {
        word: String,
        /// Level range `a..b` for the empirical trace.
        #[arg(long, default_value = "0..8")]
        levels: String,
    },
    /// Words ℓ, r with ℓ·g·r = f_k.
    IdealWitness { word: String },
    /// Finite prefix of the Hausdorff dimension sequence.
    Hausdorff {
        #[arg(long, default_value_t = 40)]
        max: u32,
    },
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Compare the automaton action with the integer action through Θ.
    ThetaCheck {
        #[arg(long, default_value_t = 12)]
        level: u32,
        /// Test this many random inputs instead of all of them.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Identity,
    Relations,
    NoSolution,
    Contraction,
    Lemmas,
    Theta,
    WnRelations,
    Idzn,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[arg(long)]
    pub level: Option<u32>,
    /// Word or ball length bound; switches `identity` to random words.
    #[arg(long)]
    pub max_len: Option<u64>,
    /// Number of random words for `identity`.
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Same as `--format json`.
    #[arg(long)]
    pub json: bool,
}

pub const EXIT_USAGE: u8 = 64;
pub const EXIT_CAP: u8 = 65;

fn exit_code_for(error: &Error) -> u8 {
    match error {
        e if e.is_parse_error() => EXIT_USAGE,
        Error::LevelAboveCap { .. } | Error::Precondition(_) => EXIT_CAP,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.output);
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("fibgrowth: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
