use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ifa::Investor;
use crate::market::{CycleReport, InitialCondition, Market};
use crate::regulation::{Regime, RegulationPolicy};
use crate::scalar::Scalar;

use super::days::aggregate_days;
use super::rolling::{annualize, max_deviation, rolling_moments, RollingMoments};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticsConfig {
    pub ticks_per_day: usize,
    /// Return per tick; 0.00025 is 2.5 basis points.
    pub scale: f64,
    pub window_days: usize,
    pub days_per_year: usize,
}

impl Default for AnalyticsConfig {
    fn default() -> Self {
        AnalyticsConfig {
            ticks_per_day: 2048,
            scale: 0.00025,
            window_days: 256,
            days_per_year: 252,
        }
    }
}

/// How many ticks a regime summary simulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TickSpan {
    /// Transient plus one cycle of the unregulated market. Every regime in a
    /// table then covers the same number of ticks.
    UnregulatedCycle,
    /// Transient plus one cycle of the regime's own orbit.
    OwnCycle,
    Fixed(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeSummary<F> {
    pub policy: RegulationPolicy,
    pub ticks: u64,
    pub avg_annualized_mean: F,
    pub avg_annualized_vol: F,
    pub skew_max_dev: F,
    pub kurt_max_dev: F,
}

/// Averages and deviations of already annualized rolling moments.
pub fn summarize_moments<F: Scalar>(
    policy: RegulationPolicy,
    ticks: u64,
    annualized: &RollingMoments<F>,
) -> Result<RegimeSummary<F>> {
    let (skew_max_dev, kurt_max_dev) = max_deviation(annualized)?;
    let avg = |v: &[F]| v.iter().fold(F::zero(), |a, &b| a + b) / F::of_usize(v.len());
    Ok(RegimeSummary {
        policy,
        ticks,
        avg_annualized_mean: avg(&annualized.mean),
        avg_annualized_vol: avg(&annualized.vol),
        skew_max_dev,
        kurt_max_dev,
    })
}

fn span_ticks(market: &Market, span: TickSpan) -> Result<u64> {
    Ok(match span {
        TickSpan::Fixed(n) => n,
        TickSpan::OwnCycle => market.find_cycle()?.total(),
        TickSpan::UnregulatedCycle => unregulated_cycle(market)?.total(),
    })
}

fn unregulated_cycle(market: &Market) -> Result<CycleReport> {
    Market {
        policy: RegulationPolicy::NONE,
        ..market.clone()
    }
    .find_cycle()
}

/// Simulate, aggregate, roll, annualize and summarize one regime.
pub fn summarize_regime<F: Scalar>(
    investor: &Investor,
    width: usize,
    init: &InitialCondition,
    policy: RegulationPolicy,
    span: TickSpan,
    config: &AnalyticsConfig,
) -> Result<RegimeSummary<F>> {
    let market = Market::new(*investor, width, init.clone(), policy)?;
    let ticks = span_ticks(&market, span)?;
    summarize_market(&market, ticks, config)
}

fn summarize_market<F: Scalar>(
    market: &Market,
    ticks: u64,
    config: &AnalyticsConfig,
) -> Result<RegimeSummary<F>> {
    let series = market.simulate(ticks as usize);
    let days = aggregate_days(&series, config.ticks_per_day, F::of(config.scale))?;
    let rolled = rolling_moments(&days, config.window_days)?;
    summarize_moments(
        market.policy,
        ticks,
        &annualize(&rolled, config.days_per_year),
    )
}

/// Baseline row plus prick and prop rows (and optionally both) for each trend
/// length, ordered by regime then trend length. Rows are computed in parallel
/// on the current rayon pool.
pub fn table1<F: Scalar>(
    investor: &Investor,
    width: usize,
    init: &InitialCondition,
    trend_lengths: std::ops::RangeInclusive<u32>,
    include_both: bool,
    span: TickSpan,
    config: &AnalyticsConfig,
) -> Result<Vec<RegimeSummary<F>>> {
    let mut policies = vec![RegulationPolicy::NONE];
    let mut regimes = vec![Regime::Prick, Regime::Prop];
    if include_both {
        regimes.push(Regime::Both);
    }
    for regime in regimes {
        for n in trend_lengths.clone() {
            policies.push(RegulationPolicy::new(regime, n)?);
        }
    }
    policies.sort();

    let base = Market::new(*investor, width, init.clone(), RegulationPolicy::NONE)?;
    let shared_ticks = match span {
        TickSpan::UnregulatedCycle => Some(base.find_cycle()?.total()),
        TickSpan::Fixed(n) => Some(n),
        TickSpan::OwnCycle => None,
    };

    policies
        .into_par_iter()
        .map(|policy| {
            let market = Market {
                policy,
                ..base.clone()
            };
            let ticks = match shared_ticks {
                Some(t) => t,
                None => market.find_cycle()?.total(),
            };
            summarize_market(&market, ticks, config)
        })
        .collect()
}
