//! Daily aggregation, rolling moments, and regime summaries.
//!
//! Everything here is generic over [`Scalar`](crate::Scalar); the crate root
//! exposes `f64` aliases for the common case.

mod days;
mod output;
mod quantile;
mod rolling;
mod summary;

pub use days::{aggregate_days, DayReturns};
pub use output::{fmt_num, write_rolling_csv, write_table1_csv};
pub use quantile::{quantile, quantile_summary, FiveNumber};
pub use rolling::{annualize, max_deviation, rolling_moments, RollingMoments};
pub use summary::{
    summarize_moments, summarize_regime, table1, AnalyticsConfig, RegimeSummary, TickSpan,
};
