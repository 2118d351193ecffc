use std::io::Write;

use crate::error::Result;
use crate::scalar::Scalar;

use super::rolling::RollingMoments;
use super::summary::RegimeSummary;

/// Fixed 15-significant-digit scientific notation, `NA` for undefined values.
pub fn fmt_num<F: Scalar>(x: F) -> String {
    let x = x.to_f64_lossy();
    if x.is_finite() {
        format!("{x:.14e}")
    } else {
        "NA".to_string()
    }
}

fn fmt_opt<F: Scalar>(x: Option<F>) -> String {
    x.map_or_else(|| "NA".to_string(), fmt_num)
}

fn write_meta<W: Write>(out: &mut W, meta: &[(&str, String)]) -> Result<()> {
    for (k, v) in meta {
        writeln!(out, "# {k}={v}")?;
    }
    Ok(())
}

/// Columns `window_end_day,mean,vol,skew,kurt` after `# key=value` lines.
pub fn write_rolling_csv<F: Scalar, W: Write>(
    moments: &RollingMoments<F>,
    meta: &[(&str, String)],
    mut out: W,
) -> Result<()> {
    write_meta(&mut out, meta)?;
    writeln!(out, "window_end_day,mean,vol,skew,kurt")?;
    for t in 0..moments.len() {
        writeln!(
            out,
            "{},{},{},{},{}",
            moments.window_end_day(t),
            fmt_num(moments.mean[t]),
            fmt_num(moments.vol[t]),
            fmt_opt(moments.skew[t]),
            fmt_opt(moments.kurt[t]),
        )?;
    }
    Ok(())
}

/// Columns `regime,n,avg_ann_mean,avg_ann_vol,skew_max_dev,kurt_max_dev`.
pub fn write_table1_csv<F: Scalar, W: Write>(
    rows: &[RegimeSummary<F>],
    meta: &[(&str, String)],
    mut out: W,
) -> Result<()> {
    write_meta(&mut out, meta)?;
    writeln!(
        out,
        "regime,n,avg_ann_mean,avg_ann_vol,skew_max_dev,kurt_max_dev"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.policy.regime().name(),
            r.policy.trend_length(),
            fmt_num(r.avg_annualized_mean),
            fmt_num(r.avg_annualized_vol),
            fmt_num(r.skew_max_dev),
            fmt_num(r.kurt_max_dev),
        )?;
    }
    Ok(())
}
