//! Deterministic market simulation driven by a two-state iterated finite
//! automaton, with bubble-pricking and crash-propping regulation overlays and
//! rolling-moment analytics.
//!
//! The model: a representative investor reads the last `w` realized UP/DOWN
//! moves with an IFA rule and trades; the trade is the next move. Rule 54 at
//! `w = 22` from an alternating start walks an orbit of 4,194,303 ticks. Ticks
//! are grouped into days (2,048 per day, 2.5 bp per tick) and summarized with
//! rolling 256-day moments.
//!
//! ```
//! use regsim::{decode_rule, InitialCondition, Investor, Market, RegulationPolicy};
//!
//! let investor = Investor::new(decode_rule(54).unwrap());
//! let market = Market::new(investor, 12, InitialCondition::AlternatingUpFirst, RegulationPolicy::NONE).unwrap();
//! assert_eq!(market.find_cycle().unwrap().cycle_length, 3255);
//! ```
//!
//! Analytics are generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix `f64`.

pub mod analytics;
pub mod empirical;
mod error;
pub mod export;
pub mod ifa;
pub mod market;
pub mod regulation;
mod scalar;
pub mod survey;

pub use error::{Error, Result};
pub use ifa::{
    decode_rule, encode_rule, enumerate_rules, process_window, Decision, IfaConvention, IfaRule,
    Investor, Move, PassOrder,
};
pub use market::{
    find_cycle, initial_window, next_move, CycleReport, InitialCondition, Market, TickSeries,
    WindowState,
};
pub use regulation::{apply, trailing_run, Regime, RegulationPolicy, TrailingRun};
pub use scalar::Scalar;

pub type DayReturns = analytics::DayReturns<f64>;
pub type RollingMoments = analytics::RollingMoments<f64>;
pub type RegimeSummary = analytics::RegimeSummary<f64>;
pub type FiveNumber = analytics::FiveNumber<f64>;
pub type CompareReport = empirical::CompareReport<f64>;

pub type DayReturnsF32 = analytics::DayReturns<f32>;
pub type RollingMomentsF32 = analytics::RollingMoments<f32>;

/// Rule number of the complexity-generating rule.
pub const RULE_54: u32 = 54;
/// Lookback width used throughout the regulation experiments.
pub const DEFAULT_WIDTH: usize = 22;
