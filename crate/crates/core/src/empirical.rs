//! Index price ingestion and side-by-side moment comparison with the model.
//!
//! Input files have a `date,close` header. Dates use a configurable `chrono`
//! format string (ISO-8601 `%Y-%m-%d` by default). Gaps are not imputed;
//! consecutive rows are consecutive trading days.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::analytics::{fmt_num, quantile_summary, DayReturns, FiveNumber, RollingMoments};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_DATE_FORMAT: &str = "%Y-%m-%d";

#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    pub label: String,
    pub observations: Vec<(NaiveDate, f64)>,
}

impl PriceSeries {
    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReturnKind {
    Simple,
    #[default]
    Log,
}

impl std::str::FromStr for ReturnKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(ReturnKind::Simple),
            "log" => Ok(ReturnKind::Log),
            _ => Err(Error::Parse {
                what: "return kind",
                value: s.to_string(),
            }),
        }
    }
}

/// Load and validate a `date,close` file. Row numbers in errors are file line
/// numbers (the header is line 1).
pub fn load_price_csv(path: &Path, date_format: &str) -> Result<PriceSeries> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_price_csv(file, &label, date_format)
}

pub fn parse_price_csv<R: std::io::Read>(
    input: R,
    label: &str,
    date_format: &str,
) -> Result<PriceSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Row {
                row: 1,
                msg: format!("missing `{name}` column"),
            })
    };
    let (date_col, close_col) = (col("date")?, col("close")?);

    let mut observations: Vec<(NaiveDate, f64)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record?;
        let field = |c: usize, what: &str| {
            record
                .get(c)
                .filter(|s| !s.is_empty())
                .ok_or_else(|| Error::Row {
                    row,
                    msg: format!("missing {what}"),
                })
        };
        let date_text = field(date_col, "date")?;
        let date = NaiveDate::parse_from_str(date_text, date_format).map_err(|e| Error::Row {
            row,
            msg: format!("bad date {date_text:?}: {e}"),
        })?;
        let close_text = field(close_col, "close")?;
        let close: f64 = close_text.parse().map_err(|_| Error::Row {
            row,
            msg: format!("bad close {close_text:?}"),
        })?;
        if !(close.is_finite() && close > 0.0) {
            return Err(Error::Row {
                row,
                msg: format!("close must be positive, got {close}"),
            });
        }
        if let Some(&(prev, _)) = observations.last() {
            if date <= prev {
                let what = if date == prev {
                    "duplicate"
                } else {
                    "out-of-order"
                };
                return Err(Error::Row {
                    row,
                    msg: format!("{what} date {date} after {prev}"),
                });
            }
        }
        observations.push((date, close));
    }
    Ok(PriceSeries {
        label: label.to_string(),
        observations,
    })
}

pub fn write_price_csv<W: Write>(
    series: &PriceSeries,
    date_format: &str,
    mut out: W,
) -> Result<()> {
    writeln!(out, "date,close")?;
    for (d, c) in &series.observations {
        writeln!(out, "{},{c}", d.format(date_format))?;
    }
    Ok(())
}

pub fn to_returns<F: Scalar>(prices: &PriceSeries, kind: ReturnKind) -> Result<DayReturns<F>> {
    if prices.len() < 2 {
        return Err(Error::Domain(
            "need at least two prices for a return".into(),
        ));
    }
    let returns = prices
        .observations
        .windows(2)
        .map(|w| {
            let ratio = w[1].1 / w[0].1;
            F::of(match kind {
                ReturnKind::Simple => ratio - 1.0,
                ReturnKind::Log => ratio.ln(),
            })
        })
        .collect();
    Ok(DayReturns::from_returns(returns))
}

pub const MOMENT_NAMES: [&str; 4] = ["mean", "vol", "skew", "kurt"];

/// Five-number summaries of each rolling moment for one series.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentBlock<F> {
    pub label: String,
    /// mean, vol, skew, kurt; `None` when no window is defined.
    pub moments: [Option<FiveNumber<F>>; 4],
}

impl<F: Scalar> MomentBlock<F> {
    pub fn of(label: &str, m: &RollingMoments<F>) -> MomentBlock<F> {
        let summary = |v: &[F]| quantile_summary(v).ok();
        MomentBlock {
            label: label.to_string(),
            moments: [
                summary(&m.mean),
                summary(&m.vol),
                summary(&m.defined_skew()),
                summary(&m.defined_kurt()),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport<F> {
    pub model: MomentBlock<F>,
    pub empirical: Vec<MomentBlock<F>>,
    /// Per moment: model median inside the empirical min..max envelope.
    /// `None` without empirical data.
    pub in_envelope: [Option<bool>; 4],
}

pub fn compare_report<F: Scalar>(
    model: &RollingMoments<F>,
    empirical: &[(String, RollingMoments<F>)],
) -> CompareReport<F> {
    let model = MomentBlock::of("model", model);
    let empirical: Vec<_> = empirical
        .iter()
        .map(|(label, m)| MomentBlock::of(label, m))
        .collect();
    let in_envelope = std::array::from_fn(|k| {
        let median = model.moments[k]?.median;
        let blocks: Vec<_> = empirical.iter().filter_map(|b| b.moments[k]).collect();
        if blocks.is_empty() {
            return None;
        }
        let lo = blocks.iter().map(|b| b.min).reduce(F::min)?;
        let hi = blocks.iter().map(|b| b.max).reduce(F::max)?;
        Some(lo <= median && median <= hi)
    });
    CompareReport {
        model,
        empirical,
        in_envelope,
    }
}

impl<F: Scalar> CompareReport<F> {
    fn blocks(&self) -> impl Iterator<Item = &MomentBlock<F>> {
        std::iter::once(&self.model).chain(self.empirical.iter())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, name) in MOMENT_NAMES.iter().enumerate() {
            let _ = writeln!(s, "{name}: {{min, q10, median, q90, max}}");
            for b in self.blocks() {
                match b.moments[k] {
                    Some(q) => {
                        let v: Vec<String> = q
                            .to_array()
                            .iter()
                            .map(|x| format!("{:.4}", x.to_f64_lossy()))
                            .collect();
                        let _ = writeln!(s, "  {:<16} {{{}}}", b.label, v.join(", "));
                    }
                    None => {
                        let _ = writeln!(s, "  {:<16} undefined", b.label);
                    }
                }
            }
            if let Some(flag) = self.in_envelope[k] {
                let verdict = if flag { "inside" } else { "outside" };
                let _ = writeln!(s, "  model median {verdict} empirical envelope");
            }
        }
        s
    }

    /// Columns `series,moment,min,q10,median,q90,max`; envelope flags as
    /// `# envelope_<moment>=` lines.
    pub fn write_csv<W: Write>(&self, meta: &[(&str, String)], mut out: W) -> Result<()> {
        for (k, v) in meta {
            writeln!(out, "# {k}={v}")?;
        }
        for (k, name) in MOMENT_NAMES.iter().enumerate() {
            if let Some(flag) = self.in_envelope[k] {
                writeln!(out, "# envelope_{name}={flag}")?;
            }
        }
        writeln!(out, "series,moment,min,q10,median,q90,max")?;
        for b in self.blocks() {
            for (k, name) in MOMENT_NAMES.iter().enumerate() {
                let cells = match b.moments[k] {
                    Some(q) => q.to_array().map(fmt_num).join(","),
                    None => ["NA"; 5].join(","),
                };
                writeln!(out, "{},{name},{cells}", b.label)?;
            }
        }
        Ok(())
    }
}
