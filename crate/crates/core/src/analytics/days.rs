use crate::error::{Error, Result};
use crate::ifa::Move;
use crate::market::TickSeries;
use crate::scalar::Scalar;

/// Daily returns. Model returns carry the tick grouping and per-tick scale
/// they were built with; empirical returns leave both unset.
#[derive(Debug, Clone, PartialEq)]
pub struct DayReturns<F> {
    pub returns: Vec<F>,
    pub ticks_per_day: Option<usize>,
    pub scale: Option<F>,
}

impl<F: Scalar> DayReturns<F> {
    pub fn from_returns(returns: Vec<F>) -> Self {
        DayReturns {
            returns,
            ticks_per_day: None,
            scale: None,
        }
    }

    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }
}

/// Group ticks into days and scale the net tick count. A trailing partial day
/// is dropped.
pub fn aggregate_days<F: Scalar>(
    ticks: &TickSeries,
    ticks_per_day: usize,
    scale: F,
) -> Result<DayReturns<F>> {
    aggregate_moves(&ticks.moves, ticks_per_day, scale)
}

pub(crate) fn aggregate_moves<F: Scalar>(
    moves: &[Move],
    ticks_per_day: usize,
    scale: F,
) -> Result<DayReturns<F>> {
    if ticks_per_day == 0 {
        return Err(Error::Domain("ticks_per_day must be at least 1".into()));
    }
    let returns = moves
        .chunks_exact(ticks_per_day)
        .map(|day| {
            let ups = day.iter().filter(|&&m| m == Move::Up).count() as i64;
            let net = 2 * ups - ticks_per_day as i64;
            scale * F::from_i64(net).expect("tick count fits")
        })
        .collect();
    Ok(DayReturns {
        returns,
        ticks_per_day: Some(ticks_per_day),
        scale: Some(scale),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Move::{Down, Up};

    #[test]
    fn full_up_day() {
        let d = aggregate_moves(&vec![Up; 2048], 2048, 0.00025f64).unwrap();
        assert_eq!(d.returns, vec![0.512]);
    }

    #[test]
    fn balanced_day() {
        let mut m = vec![Up; 1024];
        m.extend(vec![Down; 1024]);
        let d = aggregate_moves(&m, 2048, 0.00025f64).unwrap();
        assert_eq!(d.returns, vec![0.0]);
    }

    #[test]
    fn partial_day_dropped() {
        let d = aggregate_moves(&vec![Down; 3000], 2048, 0.00025f32).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.returns[0], -0.512f32);
        assert!(aggregate_moves(&[Up], 0, 1.0f64).is_err());
    }

    #[test]
    fn bounded_by_day_length() {
        let moves: Vec<Move> = (0..50_000)
            .map(|i| if i % 7 < 4 { Up } else { Down })
            .collect();
        let d = aggregate_moves(&moves, 100, 0.001f64).unwrap();
        assert!(d.returns.iter().all(|r| r.abs() <= 100.0 * 0.001 + 1e-15));
    }
}
