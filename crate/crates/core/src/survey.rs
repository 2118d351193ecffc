//! Orbit classification across the 256-rule space and across window widths.
//!
//! A rule is `complex` when its orbit is long (at least `min_cycle_fraction`
//! of the `2^w` window states) and one cycle of its tick stream does not
//! deflate below `min_compression_ratio` of its packed size.

use std::fmt;
use std::io::Write;

use flate2::write::DeflateEncoder;
use flate2::Compression;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ifa::{decode_rule, IfaConvention, Investor, Move};
use crate::market::{initial_window, simulate_from, CycleFinder, InitialCondition};
use crate::regulation::{trailing_run, RegulationPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitClass {
    Fixed,
    ShortPeriod,
    Complex,
}

impl fmt::Display for OrbitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrbitClass::Fixed => "fixed",
            OrbitClass::ShortPeriod => "short_period",
            OrbitClass::Complex => "complex",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub min_cycle_fraction: f64,
    pub min_compression_ratio: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            min_cycle_fraction: 0.25,
            min_compression_ratio: 0.9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleClassification {
    pub rule_number: u8,
    pub width: usize,
    pub transient_length: u64,
    pub cycle_length: u64,
    /// Deflated size over packed size for one cycle of ticks.
    pub compression_ratio: f64,
    pub class: OrbitClass,
}

/// Deflated bytes over packed bytes, ticks packed 8 per byte.
pub fn compression_ratio(moves: &[Move]) -> f64 {
    if moves.is_empty() {
        return 0.0;
    }
    let mut packed = vec![0u8; moves.len().div_ceil(8)];
    for (i, m) in moves.iter().enumerate() {
        packed[i / 8] |= (m.bit() as u8) << (7 - i % 8);
    }
    let mut enc = DeflateEncoder::new(Vec::new(), Compression::best());
    enc.write_all(&packed).expect("in-memory write");
    let compressed = enc.finish().expect("in-memory write");
    compressed.len() as f64 / packed.len() as f64
}

fn classify_with(
    finder: &mut CycleFinder,
    investor: &Investor,
    width: usize,
    init: &InitialCondition,
    thresholds: &Thresholds,
) -> Result<RuleClassification> {
    let start = initial_window(init, width)?;
    let report = finder.run(investor, start, &RegulationPolicy::NONE)?;
    let (_, at_cycle, run) = simulate_from(
        investor,
        start,
        trailing_run(&start.to_moves()),
        &RegulationPolicy::NONE,
        report.transient_length as usize,
    );
    let (cycle, _, _) = simulate_from(
        investor,
        at_cycle,
        run,
        &RegulationPolicy::NONE,
        report.cycle_length as usize,
    );
    let ratio = compression_ratio(&cycle);
    let long = report.cycle_length as f64 >= thresholds.min_cycle_fraction * (1u64 << width) as f64;
    let class = if report.cycle_length == 1 {
        OrbitClass::Fixed
    } else if long && ratio > thresholds.min_compression_ratio {
        OrbitClass::Complex
    } else {
        OrbitClass::ShortPeriod
    };
    Ok(RuleClassification {
        rule_number: investor.rule.number(),
        width,
        transient_length: report.transient_length,
        cycle_length: report.cycle_length,
        compression_ratio: ratio,
        class,
    })
}

pub fn classify_rule(
    investor: &Investor,
    width: usize,
    init: &InitialCondition,
    thresholds: &Thresholds,
) -> Result<RuleClassification> {
    let mut finder = CycleFinder::new(width)?;
    classify_with(&mut finder, investor, width, init, thresholds)
}

/// Classify all 256 rules, sorted by rule number.
pub fn survey_rules(
    width: usize,
    init: &InitialCondition,
    thresholds: &Thresholds,
    convention: IfaConvention,
) -> Result<Vec<RuleClassification>> {
    CycleFinder::new(width)?;
    (0..256u32)
        .into_par_iter()
        .map_init(
            || CycleFinder::new(width).expect("width checked"),
            |finder, k| {
                let investor = Investor::with_convention(decode_rule(k)?, convention);
                classify_with(finder, &investor, width, init, thresholds)
            },
        )
        .collect()
}

/// Classification of one rule at each width in `widths`, ascending.
pub fn sweep_window(
    investor: &Investor,
    widths: std::ops::RangeInclusive<usize>,
    init: &InitialCondition,
    thresholds: &Thresholds,
) -> Result<Vec<RuleClassification>> {
    widths
        .into_par_iter()
        .map(|w| classify_rule(investor, w, init, thresholds))
        .collect()
}

/// Columns `rule,w,transient,cycle_length,compression_ratio,class`.
pub fn write_survey_csv<W: Write>(
    rows: &[RuleClassification],
    meta: &[(&str, String)],
    mut out: W,
) -> Result<()> {
    for (k, v) in meta {
        writeln!(out, "# {k}={v}")?;
    }
    writeln!(out, "rule,w,transient,cycle_length,compression_ratio,class")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.rule_number,
            r.width,
            r.transient_length,
            r.cycle_length,
            crate::analytics::fmt_num(r.compression_ratio),
            r.class
        )?;
    }
    Ok(())
}
