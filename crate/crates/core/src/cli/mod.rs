//! Command-line front end: argument parsing, config resolution and dispatch.

mod commands;
mod kv;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bitgen::{default_workers, GeneratorConfig};
use crate::error::Result;
use crate::stats::DEFAULT_ALPHA;

pub use commands::{
    cmd_gen_bits, cmd_gen_digits, cmd_repro, cmd_test, plan_repro, repro_checks, repro_with,
    run_suite, sibling, BitFormat, ReproCheck, ReproOutcome, ReproPlan, Scale, Suite, SuiteResults,
    SuiteSizes, FAILED_BAND, ONES_TOLERANCE, PAIR_CELL_RANGE, PAIR_MAX_ASYMMETRY,
};
pub use kv::{
    config_from_text, config_to_text, manifest_path, parse_kv, read_config, RunManifest,
    CONFIG_KEYS,
};

#[derive(Debug, Parser)]
#[command(name = "mrng", version, about = "Random bits from digits of roots of primes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a prefix of the bit stream.
    GenBits {
        #[command(flatten)]
        gen: GenArgs,
        /// Number of bits to write.
        #[arg(long)]
        count: usize,
        #[arg(long, value_enum, default_value = "ascii")]
        format: BitFormat,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a prefix of the base-10 digit stream.
    GenDigits {
        #[command(flatten)]
        gen: GenArgs,
        /// Number of digits to write.
        #[arg(long)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run statistical tests on the stream.
    Test {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Strings per test (default 1000 for chi-square, 10000 for the ones count).
        #[arg(long)]
        strings: Option<usize>,
        /// Bits per string for the ones-count distribution.
        #[arg(long, default_value_t = 1000)]
        ls: usize,
        /// Digit pairs tallied by the pairs suite.
        #[arg(long, default_value_t = 1_000_000)]
        count: usize,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        /// Summary CSV path; further reports are written beside it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Regenerate the published tables next to measured values.
    Repro {
        #[arg(long, value_enum, default_value = "desk")]
        scale: Scale,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Run a full-scale reproduction instead of printing its plan.
        #[arg(long, alias = "yes")]
        confirm: bool,
        #[arg(long)]
        workers: Option<usize>,
    },
}

/// Generator parameters. Flags override the config file, which overrides
/// the desk defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct GenArgs {
    /// Key-value config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n_pairs: Option<usize>,
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Decimal digits computed per root.
    #[arg(long)]
    pub precision: Option<usize>,
    /// Leading fractional digits discarded per root.
    #[arg(long)]
    pub skip: Option<usize>,
    /// Which block of consecutive primes to start from.
    #[arg(long)]
    pub block: Option<usize>,
    #[arg(long)]
    pub workers: Option<usize>,
}

impl GenArgs {
    pub fn resolve(&self) -> Result<GeneratorConfig> {
        let mut config = match &self.config {
            Some(path) => read_config(path, GeneratorConfig::desk())?,
            None => GeneratorConfig::desk(),
        };
        let overrides = [
            (self.n_pairs, &mut config.n_pairs),
            (self.rounds, &mut config.rounds),
            (self.precision, &mut config.precision_digits),
            (self.skip, &mut config.skip_digits),
            (self.block, &mut config.block_index),
        ];
        for (flag, slot) in overrides {
            if let Some(v) = flag {
                *slot = v;
            }
        }
        config.validate()?;
        Ok(config)
    }

    fn workers(&self) -> usize {
        self.workers.unwrap_or_else(default_workers).max(1)
    }
}

/// What `main` should report.
#[derive(Debug)]
pub enum Outcome {
    Done(RunManifest),
    Repro(RunManifest, Vec<ReproCheck>),
    /// A full-scale run was requested without confirmation.
    PlanOnly(ReproPlan),
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::GenBits { gen, count, format, out } => {
            let config = gen.resolve()?;
            cmd_gen_bits(&config, count, format, &out, gen.workers()).map(Outcome::Done)
        }
        Command::GenDigits { gen, count, out } => {
            let config = gen.resolve()?;
            cmd_gen_digits(&config, count, &out, gen.workers()).map(Outcome::Done)
        }
        Command::Test { gen, suite, strings, ls, count, alpha, out } => {
            let config = gen.resolve()?;
            let sizes = SuiteSizes {
                chi_strings: strings.unwrap_or(SuiteSizes::DESK.chi_strings),
                dist_strings: strings.unwrap_or(SuiteSizes::DESK.dist_strings),
                dist_ls: ls,
                pairs: count,
            };
            cmd_test(&config, suite, sizes, alpha, &out, gen.workers()).map(Outcome::Done)
        }
        Command::Repro { scale, out, confirm, workers } => {
            let workers = workers.unwrap_or_else(default_workers).max(1);
            Ok(match cmd_repro(scale, &out, confirm, workers)? {
                ReproOutcome::Completed(m, checks) => Outcome::Repro(m, checks),
                ReproOutcome::NeedsConfirmation(plan) => Outcome::PlanOnly(plan),
            })
        }
    }
}
