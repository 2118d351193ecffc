//! Government intervention on realized runs.
//!
//! Pricking forces a DOWN move once the realized history ends in at least `n`
//! consecutive UPs; propping forces an UP move after at least `n` DOWNs. The
//! override replaces the intended move, and the realized move is what the
//! investor sees on later ticks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifa::Move;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    None,
    Prick,
    Prop,
    Both,
}

impl Regime {
    pub fn pricks(self) -> bool {
        matches!(self, Regime::Prick | Regime::Both)
    }

    pub fn props(self) -> bool {
        matches!(self, Regime::Prop | Regime::Both)
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::None => "none",
            Regime::Prick => "prick",
            Regime::Prop => "prop",
            Regime::Both => "both",
        }
    }
}

/// Regime plus trend length. Literal form: `none`, `prick:6`, `prop:17`, `both:6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegulationPolicy {
    regime: Regime,
    trend_length: u32,
}

impl RegulationPolicy {
    pub const NONE: RegulationPolicy = RegulationPolicy {
        regime: Regime::None,
        trend_length: 0,
    };

    pub fn new(regime: Regime, trend_length: u32) -> Result<RegulationPolicy> {
        if regime == Regime::None {
            return Ok(Self::NONE);
        }
        if trend_length < 1 {
            return Err(Error::TrendLength(regime.name().to_string()));
        }
        Ok(RegulationPolicy {
            regime,
            trend_length,
        })
    }

    pub fn prick(n: u32) -> Result<RegulationPolicy> {
        Self::new(Regime::Prick, n)
    }

    pub fn prop(n: u32) -> Result<RegulationPolicy> {
        Self::new(Regime::Prop, n)
    }

    pub fn both(n: u32) -> Result<RegulationPolicy> {
        Self::new(Regime::Both, n)
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Trend length `n`; 0 for the `none` regime.
    pub fn trend_length(&self) -> u32 {
        self.trend_length
    }

    pub fn is_none(&self) -> bool {
        self.regime == Regime::None
    }
}

impl Default for RegulationPolicy {
    fn default() -> Self {
        Self::NONE
    }
}

impl fmt::Display for RegulationPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.regime {
            Regime::None => f.write_str("none"),
            r => write!(f, "{}:{}", r.name(), self.trend_length),
        }
    }
}

impl FromStr for RegulationPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            what: "policy",
            value: s.to_string(),
        };
        let s = s.trim();
        if s == "none" {
            return Ok(Self::NONE);
        }
        let (name, n) = s.split_once(':').ok_or_else(bad)?;
        let regime = match name {
            "prick" => Regime::Prick,
            "prop" => Regime::Prop,
            "both" => Regime::Both,
            _ => return Err(bad()),
        };
        let n: u32 = n.parse().map_err(|_| bad())?;
        RegulationPolicy::new(regime, n)
    }
}

impl Serialize for RegulationPolicy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RegulationPolicy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Direction and length of the maximal constant suffix of a history.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrailingRun {
    pub direction: Move,
    pub length: u64,
}

impl TrailingRun {
    pub const EMPTY: TrailingRun = TrailingRun {
        direction: Move::Up,
        length: 0,
    };

    /// Run after appending `mv`.
    #[inline]
    pub fn extend(self, mv: Move) -> TrailingRun {
        if self.length > 0 && self.direction == mv {
            TrailingRun {
                direction: mv,
                length: self.length + 1,
            }
        } else {
            TrailingRun {
                direction: mv,
                length: 1,
            }
        }
    }

    pub fn mirror(self) -> TrailingRun {
        TrailingRun {
            direction: self.direction.mirror(),
            length: self.length,
        }
    }
}

pub fn trailing_run(history: &[Move]) -> TrailingRun {
    match history.last() {
        None => TrailingRun::EMPTY,
        Some(&last) => TrailingRun {
            direction: last,
            length: history.iter().rev().take_while(|&&m| m == last).count() as u64,
        },
    }
}

/// Realized move for this tick.
#[inline]
pub fn apply(policy: &RegulationPolicy, run: TrailingRun, intended: Move) -> Move {
    let n = u64::from(policy.trend_length);
    let triggered = run.length > 0 && run.length >= n;
    match run.direction {
        Move::Up if triggered && policy.regime.pricks() => Move::Down,
        Move::Down if triggered && policy.regime.props() => Move::Up,
        _ => intended,
    }
}
