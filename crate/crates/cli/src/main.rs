//! `qam`: analogical modeling from the command line.
//!
//! Exit codes: 0 success, 1 usage, 2 invalid input, 3 capacity exceeded.

mod commands;
mod input;
mod json;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use qam_core::natstat::{Mode, DEFAULT_ENUMERATION_CAP};
use qam_core::rational::parse_probability;
use qam_core::{EngineConfig, Error, LATTICE_MAX_VARS};

use commands::{NatstatOptions, Output};

#[derive(Parser)]
#[command(name = "qam", version, about = "Analogical modeling over a supracontext lattice")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Predict outcome probabilities for a given context.
    Predict {
        #[command(flatten)]
        input: DataInput,
        #[command(flatten)]
        engine: EngineFlags,
        /// Draw this many pointers with the seeded generator.
        #[arg(long, default_value_t = 0)]
        draws: u64,
        /// Report wall-clock time (makes the output non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Print the lattice after every occurrence is read.
    Trace {
        #[command(flatten)]
        input: DataInput,
        #[command(flatten)]
        engine: EngineFlags,
    },
    /// Natural-statistics experiments under imperfect memory.
    Natstat {
        #[command(subcommand)]
        command: NatstatCommand,
    },
    /// Truth tables of the n, and and ccn gates.
    Gates {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check a dataset and given context; prints "ok" or the violations.
    Validate {
        #[command(flatten)]
        input: DataInput,
        #[command(flatten)]
        engine: EngineFlags,
    },
    /// Compare the lattice with both homogeneity classifiers.
    CrossCheck {
        #[command(flatten)]
        input: DataInput,
        #[command(flatten)]
        engine: EngineFlags,
    },
}

#[derive(Subcommand)]
enum NatstatCommand {
    /// Probability of each decision when every occurrence is remembered with probability r.
    Decide {
        /// Outcome tokens, e.g. "s s s t".
        #[arg(required = true)]
        outcomes: Vec<String>,
        #[command(flatten)]
        opts: NatstatFlags,
    },
    /// Variance of the relative-frequency estimate next to the closed form.
    Variance {
        #[arg(required = true)]
        outcomes: Vec<String>,
        /// Outcome whose probability is estimated; defaults to the first one.
        #[arg(long)]
        target: Option<String>,
        #[command(flatten)]
        opts: NatstatFlags,
    },
    /// Lattice prediction averaged over memory subsets of the dataset.
    PredictImperfect {
        #[command(flatten)]
        input: DataInput,
        #[command(flatten)]
        lattice: LatticeFlags,
        #[command(flatten)]
        opts: NatstatFlags,
    },
}

#[derive(Args)]
struct DataInput {
    /// Dataset file: one occurrence per line, the last token is the outcome.
    dataset: PathBuf,
    /// Given context as whitespace-separated tokens, e.g. "3 1 2".
    #[arg(long, allow_hyphen_values = true, required_unless_present = "given_file", conflicts_with = "given_file")]
    given: Option<String>,
    /// File holding the given context on one line.
    #[arg(long)]
    given_file: Option<PathBuf>,
}

#[derive(Args)]
struct LatticeFlags {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=LATTICE_MAX_VARS as u64), default_value_t = EngineConfig::default().max_vars as u64)]
    max_vars: u64,
    /// Skip the per-occurrence include matrix.
    #[arg(long)]
    no_include_matrix: bool,
}

impl LatticeFlags {
    fn config(&self, seed: u64) -> EngineConfig {
        EngineConfig {
            max_vars: self.max_vars as usize,
            retain_include_matrix: !self.no_include_matrix,
            seed,
        }
    }
}

#[derive(Args)]
struct EngineFlags {
    #[command(flatten)]
    lattice: LatticeFlags,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

impl EngineFlags {
    fn config(&self) -> EngineConfig {
        self.lattice.config(self.seed)
    }
}

#[derive(Args)]
struct NatstatFlags {
    /// Retention probability, as a fraction or decimal.
    #[arg(long, value_parser = parse_r, default_value = "1/2")]
    r: Ratio<u64>,
    /// Sample memory states instead of enumerating them.
    #[arg(long)]
    monte_carlo: bool,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// Largest number of occurrences enumerated exactly.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

impl NatstatFlags {
    fn options(&self) -> NatstatOptions {
        NatstatOptions {
            r: self.r,
            mode: if self.monte_carlo {
                Mode::MonteCarlo { trials: self.trials }
            } else {
                Mode::Exact
            },
            cap: self.cap,
            seed: self.seed,
        }
    }
}

fn parse_r(s: &str) -> Result<Ratio<u64>, String> {
    parse_probability(s).map_err(|e| match e {
        Error::Undefined(msg) => msg,
        other => other.to_string(),
    })
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Everything that ends a run early, by exit code.
pub enum Failure {
    Usage(String),
    Input(String),
    Invalid(Vec<String>),
    Capacity(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Capacity(msg) => Failure::Capacity(msg),
            Error::Validation(vs) => Failure::Invalid(vs.iter().map(ToString::to_string).collect()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) | Failure::Invalid(_) => 2,
            Failure::Capacity(_) => 3,
        }
    }

    fn report(&self) {
        match self {
            Failure::Usage(m) | Failure::Input(m) => eprintln!("qam: {m}"),
            Failure::Capacity(m) => eprintln!("qam: capacity exceeded: {m}"),
            Failure::Invalid(vs) => {
                for v in vs {
                    eprintln!("qam: {v}");
                }
            }
        }
    }
}

/// A successful run may still carry a non-zero status (validate, cross-check).
struct Success {
    output: Output,
    format: Format,
    code: u8,
}

fn run(cli: Cli) -> Result<Success, Failure> {
    let ok = |output, format| Success { output, format, code: 0 };
    match cli.command {
        Command::Predict { input, engine, draws, timing } => {
            let (data, given) = load(&input)?;
            let output = commands::predict(&data, &given, &engine.config(), draws, timing)?;
            Ok(ok(output, engine.format))
        }
        Command::Trace { input, engine } => {
            let (data, given) = load(&input)?;
            Ok(ok(commands::trace_cmd(&data, &given, &engine.config())?, engine.format))
        }
        Command::Validate { input, engine } => {
            let (data, given) = load(&input)?;
            let (output, valid) = commands::validate_cmd(&data, &given, &engine.config());
            Ok(Success { output, format: engine.format, code: if valid { 0 } else { 2 } })
        }
        Command::CrossCheck { input, engine } => {
            let (data, given) = load(&input)?;
            let (output, clean) = commands::cross_check_cmd(&data, &given, &engine.config())?;
            Ok(Success { output, format: engine.format, code: if clean { 0 } else { 2 } })
        }
        Command::Gates { format } => Ok(ok(commands::gates(), format)),
        Command::Natstat { command } => match command {
            NatstatCommand::Decide { outcomes, opts } => {
                Ok(ok(commands::decide(&outcomes.join(" "), &opts.options())?, opts.format))
            }
            NatstatCommand::Variance { outcomes, target, opts } => Ok(ok(
                commands::variance(&outcomes.join(" "), target.as_deref(), &opts.options())?,
                opts.format,
            )),
            NatstatCommand::PredictImperfect { input, lattice, opts } => {
                let (data, given) = load(&input)?;
                let cfg = lattice.config(opts.seed);
                let output = commands::predict_imperfect(&data, &given, &cfg, &opts.options())?;
                Ok(ok(output, opts.format))
            }
        },
    }
}

fn load(input: &DataInput) -> Result<(input::LoadedDataset, qam_core::GivenContext), Failure> {
    let data = input::load_dataset(&input.dataset)?;
    let given = input::load_given(input.given.as_deref(), input.given_file.as_deref())?;
    Ok((data, given))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(s) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(s.output.render(s.format).as_bytes());
            let _ = out.flush();
            ExitCode::from(s.code)
        }
        Err(f) => {
            f.report();
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn argument_definitions_are_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn probability_flag_accepts_fractions_and_decimals() {
        assert_eq!(parse_r("1/2"), Ok(Ratio::new(1, 2)));
        assert_eq!(parse_r("0.25"), Ok(Ratio::new(1, 4)));
        assert!(parse_r("5/4").unwrap_err().contains("must not exceed 1"));
    }
}
