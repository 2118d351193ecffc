use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::days::DayReturns;

/// Rolling mean, volatility, skewness and kurtosis. Entry `t` covers days
/// `t ..= t + window_days - 1`.
///
/// `vol` is the sample standard deviation (divisor `N - 1`). Skewness is
/// `m3 / m2^(3/2)` and kurtosis `m4 / m2^2` with population central moments,
/// so a normal sample has kurtosis near 3. Windows with zero variance carry
/// `None` for skewness and kurtosis.
#[derive(Debug, Clone, PartialEq)]
pub struct RollingMoments<F> {
    pub window_days: usize,
    pub mean: Vec<F>,
    pub vol: Vec<F>,
    pub skew: Vec<Option<F>>,
    pub kurt: Vec<Option<F>>,
}

impl<F: Scalar> RollingMoments<F> {
    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    /// Day index of the last day covered by entry `t`.
    pub fn window_end_day(&self, t: usize) -> usize {
        t + self.window_days - 1
    }

    pub fn defined_skew(&self) -> Vec<F> {
        self.skew.iter().flatten().copied().collect()
    }

    pub fn defined_kurt(&self) -> Vec<F> {
        self.kurt.iter().flatten().copied().collect()
    }
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Default)]
struct CompensatedSum<F> {
    sum: F,
    carry: F,
}

impl<F: Scalar> CompensatedSum<F> {
    #[inline]
    fn add(&mut self, x: F) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    #[inline]
    fn value(&self) -> F {
        self.sum + self.carry
    }
}

/// Power sums of `x - anchor` over the current window.
struct PowerSums<F> {
    anchor: F,
    s: [CompensatedSum<F>; 4],
}

impl<F: Scalar> PowerSums<F> {
    fn rebuild(window: &[F]) -> Self {
        let mut total = CompensatedSum::default();
        window.iter().for_each(|&x| total.add(x));
        let anchor = total.value() / F::of_usize(window.len());
        let mut sums = PowerSums {
            anchor,
            s: [CompensatedSum::default(); 4],
        };
        window.iter().for_each(|&x| sums.push(x, F::one()));
        sums
    }

    #[inline]
    fn push(&mut self, x: F, sign: F) {
        let d = x - self.anchor;
        let d2 = d * d;
        self.s[0].add(sign * d);
        self.s[1].add(sign * d2);
        self.s[2].add(sign * d2 * d);
        self.s[3].add(sign * d2 * d2);
    }
}

struct Central<F> {
    /// Window mean minus the anchor.
    mu: F,
    m2: F,
    m3: F,
    m4: F,
}

impl<F: Scalar> Central<F> {
    fn from_sums(sums: &PowerSums<F>, n: F) -> Self {
        let three = F::of(3.0);
        let [s1, s2, s3, s4] = sums.s.map(|s| s.value() / n);
        let mu = s1;
        let mu2 = mu * mu;
        Central {
            mu,
            m2: s2 - mu2,
            m3: s3 - three * mu * s2 + (mu2 + mu2) * mu,
            m4: s4 - F::of(4.0) * mu * s3 + F::of(6.0) * mu2 * s2 - three * mu2 * mu2,
        }
    }
}

/// Slide a `window_days` window over the returns one day at a time.
///
/// Power sums are updated incrementally and re-anchored at the window mean
/// every `window_days` steps, or sooner when the mean wanders more than one
/// standard deviation from the anchor.
pub fn rolling_moments<F: Scalar>(
    returns: &DayReturns<F>,
    window_days: usize,
) -> Result<RollingMoments<F>> {
    let x = &returns.returns;
    if window_days < 2 {
        return Err(Error::Domain(
            "rolling window must span at least 2 days".into(),
        ));
    }
    if x.len() < window_days {
        return Err(Error::Domain(format!(
            "{} days of returns is shorter than the {window_days}-day window",
            x.len()
        )));
    }
    let count = x.len() - window_days + 1;
    let n = F::of_usize(window_days);
    let sample_correction = n / F::of_usize(window_days - 1);

    let mut out = RollingMoments {
        window_days,
        mean: Vec::with_capacity(count),
        vol: Vec::with_capacity(count),
        skew: Vec::with_capacity(count),
        kurt: Vec::with_capacity(count),
    };

    // length of the run of equal values ending at the current window end
    let mut equal_run = 1usize;
    for i in 1..window_days {
        equal_run = if x[i] == x[i - 1] { equal_run + 1 } else { 1 };
    }

    let mut sums = PowerSums::rebuild(&x[..window_days]);
    for t in 0..count {
        if t > 0 {
            let end = t + window_days - 1;
            equal_run = if x[end] == x[end - 1] {
                equal_run + 1
            } else {
                1
            };
            if t % window_days == 0 {
                sums = PowerSums::rebuild(&x[t..=end]);
            } else {
                sums.push(x[end], F::one());
                sums.push(x[t - 1], -F::one());
            }
        }

        let mut central = Central::from_sums(&sums, n);
        if central.mu * central.mu > central.m2 && equal_run < window_days {
            // anchor has drifted more than one sd from the mean
            sums = PowerSums::rebuild(&x[t..t + window_days]);
            central = Central::from_sums(&sums, n);
        }
        let Central { mu, m2, m3, m4 } = central;

        out.mean.push(sums.anchor + mu);
        if equal_run >= window_days || m2 <= F::zero() {
            out.vol.push(F::zero());
            out.skew.push(None);
            out.kurt.push(None);
        } else {
            let sd = m2.sqrt();
            out.vol.push((m2 * sample_correction).sqrt());
            out.skew.push(Some(m3 / (m2 * sd)));
            out.kurt.push(Some(m4 / (m2 * m2)));
        }
    }
    Ok(out)
}

/// Scale means by `days_per_year` and vols by its square root.
pub fn annualize<F: Scalar>(
    moments: &RollingMoments<F>,
    days_per_year: usize,
) -> RollingMoments<F> {
    let d = F::of_usize(days_per_year);
    let root = d.sqrt();
    RollingMoments {
        window_days: moments.window_days,
        mean: moments.mean.iter().map(|&m| m * d).collect(),
        vol: moments.vol.iter().map(|&v| v * root).collect(),
        skew: moments.skew.clone(),
        kurt: moments.kurt.clone(),
    }
}

/// `(max |skew|, max |kurt - 3|)` over windows with defined moments.
pub fn max_deviation<F: Scalar>(moments: &RollingMoments<F>) -> Result<(F, F)> {
    let three = F::of(3.0);
    let skew = moments
        .skew
        .iter()
        .flatten()
        .map(|s| s.abs())
        .reduce(F::max);
    let kurt = moments
        .kurt
        .iter()
        .flatten()
        .map(|k| (*k - three).abs())
        .reduce(F::max);
    match (skew, kurt) {
        (Some(s), Some(k)) => Ok((s, k)),
        _ => Err(Error::Domain(
            "no rolling window has a defined skewness and kurtosis".into(),
        )),
    }
}
