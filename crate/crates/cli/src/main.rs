mod commands;
mod config;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use regsim::empirical::ReturnKind;
use regsim::{InitialCondition, RegulationPolicy};

use config::{Command, RunConfig, TickFormat};

#[derive(Parser)]
#[command(
    name = "regsim",
    version,
    about = "Deterministic regulated-market simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate ticks and export them.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        analytics: AnalyticsArgs,
        #[arg(long, value_enum)]
        format: Option<TickFormat>,
    },
    /// Report the transient and cycle length as a JSON line.
    Cycle {
        #[command(flatten)]
        common: Common,
    },
    /// Moment summaries for the baseline and every regulated regime.
    Table1 {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        analytics: AnalyticsArgs,
        #[arg(long)]
        n_min: Option<u32>,
        #[arg(long)]
        n_max: Option<u32>,
        /// Add prick-and-prop rows.
        #[arg(long)]
        include_both: bool,
        /// Ticks per regime when `--ticks` is not given.
        #[arg(long, value_enum)]
        span: Option<SpanArg>,
    },
    /// Classify every rule at one width, or one rule across widths.
    Survey {
        #[command(flatten)]
        common: Common,
        /// Sweep `--rule` over `--w-min..=--w-max` instead of surveying all rules.
        #[arg(long)]
        sweep: bool,
        #[arg(long)]
        w_min: Option<usize>,
        #[arg(long)]
        w_max: Option<usize>,
        #[arg(long)]
        min_cycle_fraction: Option<f64>,
        #[arg(long)]
        min_compression_ratio: Option<f64>,
    },
    /// Rolling moments of one regime as CSV.
    Moments {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        analytics: AnalyticsArgs,
        /// Report raw daily moments instead of annualized ones.
        #[arg(long)]
        no_annualize: bool,
    },
    /// Compare model rolling moments with index price files.
    Compare {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        analytics: AnalyticsArgs,
        #[arg(long)]
        no_annualize: bool,
        /// `date,close` CSV files.
        #[arg(long = "empirical", value_name = "PATH")]
        empirical: Vec<PathBuf>,
        #[arg(long, value_parser = parse_return_kind)]
        return_kind: Option<ReturnKind>,
        #[arg(long)]
        empirical_window: Option<usize>,
        #[arg(long)]
        date_format: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SpanArg {
    UnregulatedCycle,
    OwnCycle,
}

#[derive(Args)]
struct Common {
    /// JSON config, or an earlier output whose embedded config to reuse.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Worker threads for sweeps; defaults to the number of processors.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    rule: Option<u32>,
    #[arg(long)]
    w: Option<usize>,
    /// `alternating`, `all_up` or `custom:UDDU...` (oldest first).
    #[arg(long, value_parser = parse_init)]
    init: Option<InitialCondition>,
    /// `none`, `prick:N`, `prop:N` or `both:N`.
    #[arg(long, value_parser = parse_policy)]
    policy: Option<RegulationPolicy>,
    #[arg(long)]
    ticks: Option<u64>,
}

#[derive(Args)]
struct AnalyticsArgs {
    #[arg(long)]
    ticks_per_day: Option<usize>,
    /// Return per tick.
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long)]
    window_days: Option<usize>,
    #[arg(long)]
    days_per_year: Option<usize>,
}

fn parse_init(s: &str) -> Result<InitialCondition, String> {
    s.parse().map_err(|e: regsim::Error| e.to_string())
}

fn parse_policy(s: &str) -> Result<RegulationPolicy, String> {
    s.parse().map_err(|e: regsim::Error| e.to_string())
}

fn parse_return_kind(s: &str) -> Result<ReturnKind, String> {
    s.parse().map_err(|e: regsim::Error| e.to_string())
}

impl Common {
    fn flags(&self) -> RunConfig {
        RunConfig {
            rule: self.rule,
            w: self.w,
            init: self.init.clone(),
            policy: self.policy,
            ticks: self.ticks,
            ..RunConfig::default()
        }
    }
}

impl AnalyticsArgs {
    fn apply(&self, c: RunConfig) -> RunConfig {
        RunConfig {
            ticks_per_day: self.ticks_per_day.or(c.ticks_per_day),
            scale: self.scale.or(c.scale),
            window_days: self.window_days.or(c.window_days),
            days_per_year: self.days_per_year.or(c.days_per_year),
            ..c
        }
    }
}

fn flag(on: bool) -> Option<bool> {
    on.then_some(true)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let (command, common, flags) = match &cli.command {
        Cmd::Simulate {
            common,
            analytics,
            format,
        } => (
            Command::Simulate,
            common,
            analytics.apply(RunConfig {
                format: *format,
                ..common.flags()
            }),
        ),
        Cmd::Cycle { common } => (Command::Cycle, common, common.flags()),
        Cmd::Table1 {
            common,
            analytics,
            n_min,
            n_max,
            include_both,
            span,
        } => (
            Command::Table1,
            common,
            analytics.apply(RunConfig {
                n_min: *n_min,
                n_max: *n_max,
                include_both: flag(*include_both),
                span: span.map(|s| match s {
                    SpanArg::UnregulatedCycle => regsim::analytics::TickSpan::UnregulatedCycle,
                    SpanArg::OwnCycle => regsim::analytics::TickSpan::OwnCycle,
                }),
                ..common.flags()
            }),
        ),
        Cmd::Survey {
            common,
            sweep,
            w_min,
            w_max,
            min_cycle_fraction,
            min_compression_ratio,
        } => (
            Command::Survey,
            common,
            RunConfig {
                sweep: flag(*sweep || w_min.is_some() || w_max.is_some()),
                w_min: *w_min,
                w_max: *w_max,
                min_cycle_fraction: *min_cycle_fraction,
                min_compression_ratio: *min_compression_ratio,
                ..common.flags()
            },
        ),
        Cmd::Moments {
            common,
            analytics,
            no_annualize,
        } => (
            Command::Moments,
            common,
            analytics.apply(RunConfig {
                annualize: no_annualize.then_some(false),
                ..common.flags()
            }),
        ),
        Cmd::Compare {
            common,
            analytics,
            no_annualize,
            empirical,
            return_kind,
            empirical_window,
            date_format,
        } => (
            Command::Compare,
            common,
            analytics.apply(RunConfig {
                annualize: no_annualize.then_some(false),
                empirical: (!empirical.is_empty()).then(|| {
                    empirical
                        .iter()
                        .map(|p| p.to_string_lossy().into_owned())
                        .collect()
                }),
                return_kind: *return_kind,
                empirical_window: *empirical_window,
                date_format: date_format.clone(),
                ..common.flags()
            }),
        ),
    };

    if let Some(jobs) = common.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()?;
    }
    let base = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let config = base.overlay(flags).resolve(command)?;
    let output = commands::run(&config)?;
    commands::emit(&output, common.output.as_deref())
}
