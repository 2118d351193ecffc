use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use regsim::analytics::{
    aggregate_days, annualize, fmt_num, rolling_moments, table1, write_rolling_csv,
    write_table1_csv,
};
use regsim::empirical::{compare_report, load_price_csv, to_returns};
use regsim::export::{write_bits, write_rle};
use regsim::survey::{survey_rules, sweep_window, write_survey_csv, OrbitClass};
use regsim::{IfaConvention, RollingMoments};

use crate::config::{Command, RunConfig, TickFormat};

/// Finished output of a command, held in memory until it is complete.
pub struct Output {
    pub body: Vec<u8>,
    /// Human-readable summary, kept apart from the machine-readable body.
    pub report: Option<String>,
}

pub fn run(config: &RunConfig) -> Result<Output> {
    let meta = [("config", config.to_json())];
    let mut body = Vec::new();
    let mut report = None;
    match config.command.expect("resolved") {
        Command::Simulate => {
            let series = config.market()?.simulate(ticks(config)?);
            match config.format.expect("resolved") {
                TickFormat::Bits => write_bits(&series, &meta, &mut body)?,
                TickFormat::Rle => write_rle(&series, &meta, &mut body)?,
                TickFormat::Days => {
                    let (tpd, scale) = config.day_grid();
                    let days = aggregate_days(&series, tpd, scale)?;
                    writeln!(body, "# config={}", meta[0].1)?;
                    writeln!(body, "day,return")?;
                    for (d, r) in days.returns.iter().enumerate() {
                        writeln!(body, "{d},{}", fmt_num(*r))?;
                    }
                }
            }
        }
        Command::Cycle => {
            let c = config.market()?.find_cycle()?;
            let line = serde_json::json!({
                "config": config,
                "transient_length": c.transient_length,
                "cycle_length": c.cycle_length,
            });
            writeln!(body, "{line}")?;
        }
        Command::Table1 => {
            let rows = table1::<f64>(
                &config.investor()?,
                config.w(),
                config.init(),
                config.n_min.expect("resolved")..=config.n_max.expect("resolved"),
                config.include_both.expect("resolved"),
                config.span.expect("resolved"),
                &config.analytics()?,
            )?;
            write_table1_csv(&rows, &meta, &mut body)?;
        }
        Command::Survey => {
            let rows = if config.sweep == Some(true) {
                sweep_window(
                    &config.investor()?,
                    config.w_min.expect("resolved")..=config.w_max.expect("resolved"),
                    config.init(),
                    &config.thresholds(),
                )?
            } else {
                survey_rules(
                    config.w(),
                    config.init(),
                    &config.thresholds(),
                    IfaConvention::default(),
                )?
            };
            write_survey_csv(&rows, &meta, &mut body)?;
            let complex: Vec<String> = rows
                .iter()
                .filter(|r| r.class == OrbitClass::Complex)
                .map(|r| format!("rule {} w {}", r.rule_number, r.width))
                .collect();
            report = Some(format!(
                "{} complex: {}\n",
                complex.len(),
                complex.join(", ")
            ));
        }
        Command::Moments => {
            write_rolling_csv(&model_moments(config)?, &meta, &mut body)?;
        }
        Command::Compare => {
            let model = model_moments(config)?;
            let window = config.empirical_window.expect("resolved");
            let fmt = config.date_format.as_deref().expect("resolved");
            let mut empirical = Vec::new();
            for path in config.empirical.as_deref().unwrap_or_default() {
                let prices = load_price_csv(Path::new(path), fmt)
                    .with_context(|| format!("loading {path}"))?;
                let returns = to_returns::<f64>(&prices, config.return_kind.expect("resolved"))?;
                let rolled = rolling_moments(&returns, window)
                    .with_context(|| format!("rolling moments of {path}"))?;
                empirical.push((prices.label.clone(), maybe_annualize(config, rolled)));
            }
            let cmp = compare_report(&model, &empirical);
            cmp.write_csv(&meta, &mut body)?;
            report = Some(cmp.to_text());
        }
    }
    Ok(Output { body, report })
}

fn ticks(config: &RunConfig) -> Result<usize> {
    let t = config.ticks.expect("resolved");
    usize::try_from(t).context("tick count does not fit in memory")
}

fn maybe_annualize(config: &RunConfig, m: RollingMoments) -> RollingMoments {
    if config.annualize == Some(true) {
        annualize(&m, config.days_per_year.expect("resolved"))
    } else {
        m
    }
}

fn model_moments(config: &RunConfig) -> Result<RollingMoments> {
    let a = config.analytics()?;
    let series = config.market()?.simulate(ticks(config)?);
    let days = aggregate_days(&series, a.ticks_per_day, a.scale)?;
    Ok(maybe_annualize(
        config,
        rolling_moments(&days, a.window_days)?,
    ))
}

/// Write the body to `path` (via a temporary file renamed into place) or to
/// standard output. The report goes to standard output when the body went to
/// a file, otherwise to standard error.
pub fn emit(output: &Output, path: Option<&Path>) -> Result<()> {
    match path {
        Some(path) => {
            let tmp = path.with_extension(format!("partial-{}", std::process::id()));
            std::fs::write(&tmp, &output.body)
                .with_context(|| format!("writing {}", tmp.display()))?;
            std::fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))?;
            if let Some(r) = &output.report {
                print!("{r}");
            }
        }
        None => {
            std::io::stdout().write_all(&output.body)?;
            if let Some(r) = &output.report {
                eprint!("{r}");
            }
        }
    }
    Ok(())
}
