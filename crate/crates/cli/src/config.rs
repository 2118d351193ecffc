//! Run configuration: a JSON document, optionally embedded in an earlier
//! output, overridden field by field from the command line.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use clap::ValueEnum;
use regsim::analytics::{AnalyticsConfig, TickSpan};
use regsim::empirical::{ReturnKind, DEFAULT_DATE_FORMAT};
use regsim::survey::Thresholds;
use regsim::{decode_rule, InitialCondition, Investor, Market, RegulationPolicy};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Simulate,
    Cycle,
    Table1,
    Survey,
    Moments,
    Compare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum TickFormat {
    /// Packed bit stream after a text header.
    Bits,
    /// One `U <len>` / `D <len>` line per run.
    Rle,
    /// Daily returns as CSV.
    Days,
}

/// Every field is optional in a config file; [`RunConfig::resolve`] fills the
/// defaults relevant to one command and drops the rest.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init: Option<InitialCondition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub policy: Option<RegulationPolicy>,
    /// Tick count; defaults to the transient plus one cycle of the
    /// unregulated market.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ticks: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ticks_per_day: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_days: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub days_per_year: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<TickFormat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub annualize: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_min: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub include_both: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<TickSpan>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_min: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_cycle_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_compression_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub return_kind: Option<ReturnKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical_window: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub date_format: Option<String>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($field:ident),*) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field; } )*
    };
}

impl RunConfig {
    /// Fields set in `top` replace those in `self`.
    pub fn overlay(mut self, top: RunConfig) -> RunConfig {
        overlay!(
            self,
            top,
            command,
            rule,
            w,
            init,
            policy,
            ticks,
            ticks_per_day,
            scale,
            window_days,
            days_per_year,
            format,
            annualize,
            n_min,
            n_max,
            include_both,
            span,
            sweep,
            w_min,
            w_max,
            min_cycle_fraction,
            min_compression_ratio,
            empirical,
            return_kind,
            empirical_window,
            date_format
        );
        self
    }

    /// Read a JSON config, or recover the config embedded in an earlier
    /// output file (`# config=`, `config=` or a cycle JSON line).
    pub fn load(path: &Path) -> Result<RunConfig> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let parse = |text: &str| -> Result<RunConfig> {
            serde_json::from_str(text)
                .with_context(|| format!("malformed config in {}", path.display()))
        };
        let text = String::from_utf8_lossy(&bytes);
        if text.trim_start().starts_with('{') {
            let value: serde_json::Value = serde_json::from_str(text.trim())
                .with_context(|| format!("malformed JSON in {}", path.display()))?;
            return match value.get("config") {
                Some(inner) if value.get("cycle_length").is_some() => {
                    Ok(serde_json::from_value(inner.clone())?)
                }
                _ => parse(text.trim()),
            };
        }
        for line in bytes.split(|&b| b == b'\n') {
            if line.is_empty() {
                break;
            }
            let line = String::from_utf8_lossy(line);
            let line = line.strip_prefix("# ").unwrap_or(&line);
            if let Some(json) = line.strip_prefix("config=") {
                return parse(json);
            }
        }
        bail!(
            "{} holds neither a JSON config nor an embedded one",
            path.display()
        )
    }

    /// Fill defaults for `command`, clear fields it does not use, and
    /// validate.
    pub fn resolve(self, command: Command) -> Result<RunConfig> {
        let d = AnalyticsConfig::default();
        let t = Thresholds::default();
        let mut r = RunConfig {
            command: Some(command),
            rule: Some(self.rule.unwrap_or(regsim::RULE_54)),
            w: Some(self.w.unwrap_or(regsim::DEFAULT_WIDTH)),
            init: Some(self.init.clone().unwrap_or(match command {
                Command::Survey => InitialCondition::AllUp,
                _ => InitialCondition::AlternatingUpFirst,
            })),
            policy: Some(self.policy.unwrap_or(RegulationPolicy::NONE)),
            ..RunConfig::default()
        };
        let analytics = |r: &mut RunConfig| {
            r.ticks_per_day = Some(self.ticks_per_day.unwrap_or(d.ticks_per_day));
            r.scale = Some(self.scale.unwrap_or(d.scale));
            r.window_days = Some(self.window_days.unwrap_or(d.window_days));
            r.days_per_year = Some(self.days_per_year.unwrap_or(d.days_per_year));
        };
        match command {
            Command::Simulate => {
                r.format = Some(self.format.unwrap_or(TickFormat::Bits));
                if r.format == Some(TickFormat::Days) {
                    r.ticks_per_day = Some(self.ticks_per_day.unwrap_or(d.ticks_per_day));
                    r.scale = Some(self.scale.unwrap_or(d.scale));
                }
                r.ticks = self.ticks;
            }
            Command::Cycle => {}
            Command::Table1 => {
                analytics(&mut r);
                r.n_min = Some(self.n_min.unwrap_or(2));
                r.n_max = Some(self.n_max.unwrap_or(20));
                r.include_both = Some(self.include_both.unwrap_or(false));
                r.span = Some(match self.ticks {
                    Some(n) => TickSpan::Fixed(n),
                    None => self.span.unwrap_or(TickSpan::UnregulatedCycle),
                });
            }
            Command::Survey => {
                r.sweep = Some(self.sweep.unwrap_or(false));
                if r.sweep == Some(true) {
                    r.w_min = Some(self.w_min.unwrap_or(2));
                    r.w_max = Some(self.w_max.unwrap_or(26));
                }
                r.min_cycle_fraction =
                    Some(self.min_cycle_fraction.unwrap_or(t.min_cycle_fraction));
                r.min_compression_ratio = Some(
                    self.min_compression_ratio
                        .unwrap_or(t.min_compression_ratio),
                );
            }
            Command::Moments => {
                analytics(&mut r);
                r.annualize = Some(self.annualize.unwrap_or(true));
                r.ticks = self.ticks;
            }
            Command::Compare => {
                analytics(&mut r);
                r.annualize = Some(self.annualize.unwrap_or(true));
                r.ticks = self.ticks;
                r.empirical = Some(self.empirical.clone().unwrap_or_default());
                r.return_kind = Some(self.return_kind.unwrap_or_default());
                r.empirical_window = Some(self.empirical_window.unwrap_or(252));
                r.date_format = Some(
                    self.date_format
                        .clone()
                        .unwrap_or_else(|| DEFAULT_DATE_FORMAT.to_string()),
                );
            }
        }
        r.validate()?;
        if matches!(
            command,
            Command::Simulate | Command::Moments | Command::Compare
        ) && r.ticks.is_none()
        {
            let base = Market {
                policy: RegulationPolicy::NONE,
                ..r.market()?
            };
            r.ticks = Some(base.find_cycle()?.total());
        }
        Ok(r)
    }

    fn validate(&self) -> Result<()> {
        decode_rule(self.rule())?;
        let w = self.w();
        if !(1..=regsim::market::MAX_WIDTH).contains(&w) {
            bail!("w must be in 1..={}, got {w}", regsim::market::MAX_WIDTH);
        }
        self.market()?;
        if self.command == Some(Command::Survey) && !self.policy().is_none() {
            bail!("survey classifies unregulated orbits; drop --policy");
        }
        if let Some(tpd) = self.ticks_per_day {
            if tpd == 0 {
                bail!("ticks_per_day must be at least 1");
            }
        }
        if let Some(s) = self.scale {
            if !(s.is_finite() && s > 0.0) {
                bail!("scale must be a positive finite number, got {s}");
            }
        }
        if let Some(wd) = self.window_days {
            if wd < 2 {
                bail!("window_days must be at least 2");
            }
        }
        if self.days_per_year == Some(0) {
            bail!("days_per_year must be at least 1");
        }
        if let (Some(lo), Some(hi)) = (self.n_min, self.n_max) {
            if lo < 1 || lo > hi {
                bail!("trend length range {lo}..={hi} is empty or starts below 1");
            }
        }
        if let (Some(lo), Some(hi)) = (self.w_min, self.w_max) {
            if lo < 1 || lo > hi || hi > regsim::market::MAX_WIDTH {
                bail!(
                    "width range {lo}..={hi} must lie within 1..={}",
                    regsim::market::MAX_WIDTH
                );
            }
        }
        for (name, v) in [
            ("min_cycle_fraction", self.min_cycle_fraction),
            ("min_compression_ratio", self.min_compression_ratio),
        ] {
            if let Some(v) = v {
                if !(v.is_finite() && v >= 0.0) {
                    bail!("{name} must be a non-negative number, got {v}");
                }
            }
        }
        if self.empirical_window.is_some_and(|e| e < 2) {
            bail!("empirical_window must be at least 2");
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn rule(&self) -> u32 {
        self.rule.expect("resolved")
    }

    pub fn w(&self) -> usize {
        self.w.expect("resolved")
    }

    pub fn init(&self) -> &InitialCondition {
        self.init.as_ref().expect("resolved")
    }

    pub fn policy(&self) -> RegulationPolicy {
        self.policy.expect("resolved")
    }

    pub fn investor(&self) -> Result<Investor> {
        Ok(Investor::new(decode_rule(self.rule())?))
    }

    pub fn market(&self) -> Result<Market> {
        Ok(Market::new(
            self.investor()?,
            self.w(),
            self.init().clone(),
            self.policy(),
        )?)
    }

    pub fn analytics(&self) -> Result<AnalyticsConfig> {
        let missing = || anyhow!("analytics settings were not resolved");
        Ok(AnalyticsConfig {
            ticks_per_day: self.ticks_per_day.ok_or_else(missing)?,
            scale: self.scale.ok_or_else(missing)?,
            window_days: self.window_days.ok_or_else(missing)?,
            days_per_year: self.days_per_year.ok_or_else(missing)?,
        })
    }

    /// Ticks per day and return per tick.
    pub fn day_grid(&self) -> (usize, f64) {
        (
            self.ticks_per_day.expect("resolved"),
            self.scale.expect("resolved"),
        )
    }

    pub fn thresholds(&self) -> Thresholds {
        Thresholds {
            min_cycle_fraction: self.min_cycle_fraction.expect("resolved"),
            min_compression_ratio: self.min_compression_ratio.expect("resolved"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolve_fills_and_prunes() {
        let r = RunConfig {
            n_min: Some(3),
            ..RunConfig::default()
        }
        .resolve(Command::Cycle)
        .unwrap();
        assert_eq!(r.n_min, None);
        assert_eq!(r.rule, Some(54));
        assert_eq!(r.init, Some(InitialCondition::AlternatingUpFirst));
        let s = RunConfig::default().resolve(Command::Survey).unwrap();
        assert_eq!(s.init, Some(InitialCondition::AllUp));
    }

    #[test]
    fn resolved_config_is_a_fixed_point() {
        for cmd in [Command::Table1, Command::Survey, Command::Compare] {
            let r = RunConfig::default().resolve(cmd).unwrap();
            let again: RunConfig = serde_json::from_str(&r.to_json()).unwrap();
            assert_eq!(again.clone().resolve(cmd).unwrap(), r);
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"rul": 54}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"policy": "prick:0"}"#).is_err());
    }

    #[test]
    fn overlay_prefers_top() {
        let base = RunConfig {
            rule: Some(30),
            w: Some(10),
            ..RunConfig::default()
        };
        let top = RunConfig {
            w: Some(12),
            ..RunConfig::default()
        };
        let m = base.overlay(top);
        assert_eq!((m.rule, m.w), (Some(30), Some(12)));
    }
}
