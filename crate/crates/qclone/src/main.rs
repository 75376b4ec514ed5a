//! Command-line interface: list the function families, print exact
//! efficiencies and scores, run seeded Monte Carlo comparisons, and run
//! the verification suite.

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use qclone::family::{FamilyBundle, Variant};
use qclone::report::{
    render_experiment, render_listing, AnalyticReport, EfficienciesReport, ExperimentReport,
    FamiliesReport, OutputFormat,
};
use qclone::strategies::{analytic_scores, run_experiment, RunConfig};
use qclone::verify;

#[derive(Parser)]
#[command(
    name = "qclone",
    version,
    about = "Probabilistic cloning of oracle query states: exact efficiencies and Monte Carlo strategy comparison"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the instance function families for one variant.
    Families {
        #[command(flatten)]
        common: Common,
    },
    /// Print the optimal cloning efficiencies and the failure posterior.
    Efficiencies {
        #[command(flatten)]
        common: Common,
    },
    /// Print the analytic success probabilities of both strategies.
    Analytic {
        #[command(flatten)]
        common: Common,
    },
    /// Run the seeded Monte Carlo comparison of both strategies.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Number of trials per strategy.
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        /// RNG seed; identical seeds reproduce identical counts.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Worker threads (default: the rayon global pool).
        #[arg(long)]
        threads: Option<usize>,
        /// Sample f1 and f2 without replacement.
        #[arg(long)]
        distinct_f12: bool,
        /// Also measure the state on the wrong deterministic branch
        /// instead of falling back to the two-outcome lottery.
        #[arg(long)]
        physical_wrong_branch: bool,
    },
    /// Run the verification suite (eight numbered criteria).
    Verify {
        /// Restrict checks to one family; criteria about the other
        /// family are reported as skipped.
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
        /// Run a single criterion (1 through 8).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=8))]
        criterion: Option<u8>,
    },
}

/// Options shared by every listing and simulation subcommand.
#[derive(Args)]
struct Common {
    /// Function family.
    #[arg(long, value_enum, default_value_t = VariantArg::A)]
    variant: VariantArg,
    /// Number of oracle input bits (default: the family's base level).
    #[arg(long)]
    n: Option<usize>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputArg::Table)]
    output: OutputArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    A,
    B,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::A => Variant::A,
            VariantArg::B => Variant::B,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputArg {
    Json,
    Csv,
    Table,
}

impl From<OutputArg> for OutputFormat {
    fn from(o: OutputArg) -> Self {
        match o {
            OutputArg::Json => OutputFormat::Json,
            OutputArg::Csv => OutputFormat::Csv,
            OutputArg::Table => OutputFormat::Table,
        }
    }
}

impl Common {
    fn resolve(&self) -> (Variant, usize, OutputFormat) {
        let variant: Variant = self.variant.into();
        (variant, self.n.unwrap_or(variant.base_n()), self.output.into())
    }
}

fn run(command: Command) -> qclone::error::Result<ExitCode> {
    match command {
        Command::Families { common } => {
            let (variant, n, format) = common.resolve();
            let bundle = FamilyBundle::build(variant, n)?;
            let report = FamiliesReport::new(&bundle);
            println!("{}", render_listing(|| report.to_json(), || report.to_table(), format)?);
        }
        Command::Efficiencies { common } => {
            let (variant, n, format) = common.resolve();
            let (_, spec) = qclone::optimal_spec(variant, n)?;
            let report = EfficienciesReport::new(variant, n, &spec);
            println!("{}", render_listing(|| report.to_json(), || report.to_table(), format)?);
        }
        Command::Analytic { common } => {
            let (variant, n, format) = common.resolve();
            let (_, spec) = qclone::optimal_spec(variant, n)?;
            let scores = analytic_scores(variant, n, spec.gammas());
            let report = AnalyticReport::new(variant, n, spec.gammas(), &scores);
            println!("{}", render_listing(|| report.to_json(), || report.to_table(), format)?);
        }
        Command::Simulate {
            common,
            trials,
            seed,
            threads,
            distinct_f12,
            physical_wrong_branch,
        } => {
            let (variant, n, format) = common.resolve();
            let mut config = RunConfig::new(variant, n);
            config.trials = trials;
            config.seed = seed;
            config.threads = threads;
            config.distinct_f12 = distinct_f12;
            config.physical_wrong_branch = physical_wrong_branch;
            let result = run_experiment(config)?;
            let report = ExperimentReport::new(&result);
            println!("{}", render_experiment(&report, format));
        }
        Command::Verify { variant, criterion } => {
            let variant = variant.map(Variant::from);
            let results = match criterion {
                Some(id) => vec![verify::run_criterion(id, variant)],
                None => verify::run_all(variant),
            };
            let mut all_passed = true;
            for r in &results {
                println!("{}", r.line());
                all_passed &= r.passed;
            }
            if !all_passed {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
