use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Minimum, 10% quantile, median, 90% quantile, maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiveNumber<F> {
    pub min: F,
    pub q10: F,
    pub median: F,
    pub q90: F,
    pub max: F,
}

impl<F: Scalar> FiveNumber<F> {
    pub fn to_array(&self) -> [F; 5] {
        [self.min, self.q10, self.median, self.q90, self.max]
    }
}

/// Quantile of already sorted data, linear interpolation between order
/// statistics at position `(n - 1) * p`.
pub fn quantile<F: Scalar>(sorted: &[F], p: f64) -> F {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = F::of(h - lo as f64);
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

pub fn quantile_summary<F: Scalar>(series: &[F]) -> Result<FiveNumber<F>> {
    if series.is_empty() {
        return Err(Error::Domain("quantile summary of an empty series".into()));
    }
    if series.iter().any(|x| x.is_nan()) {
        return Err(Error::Domain("quantile summary input contains NaN".into()));
    }
    let mut sorted = series.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    Ok(FiveNumber {
        min: sorted[0],
        q10: quantile(&sorted, 0.1),
        median: quantile(&sorted, 0.5),
        q90: quantile(&sorted, 0.9),
        max: sorted[sorted.len() - 1],
    })
}
