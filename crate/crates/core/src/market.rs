//! The closed-loop tick process and exact orbit detection over window states.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifa::{Investor, Move};
use crate::regulation::{apply, trailing_run, RegulationPolicy, TrailingRun};

pub const MAX_WIDTH: usize = 30;

/// The last `width` realized moves packed into an integer. Bit `i` holds the
/// move of age `i`, so bit 0 is the newest move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WindowState {
    bits: u32,
    width: u8,
}

impl WindowState {
    pub fn new(bits: u32, width: usize) -> Result<WindowState> {
        check_width(width)?;
        Ok(WindowState {
            bits: bits & mask(width),
            width: width as u8,
        })
    }

    /// Pack a window given oldest first.
    pub fn from_moves(moves: &[Move]) -> Result<WindowState> {
        check_width(moves.len())?;
        let bits = moves.iter().fold(0u32, |acc, m| (acc << 1) | m.bit());
        Ok(WindowState {
            bits,
            width: moves.len() as u8,
        })
    }

    /// Unpack, oldest first.
    pub fn to_moves(&self) -> Vec<Move> {
        (0..self.width())
            .rev()
            .map(|age| Move::from_bit(self.bits >> age))
            .collect()
    }

    #[inline]
    pub fn bits(&self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn width(&self) -> usize {
        usize::from(self.width)
    }

    #[inline]
    pub fn newest(&self) -> Move {
        Move::from_bit(self.bits)
    }

    /// Slide the window: drop the oldest move, append `mv` as the newest.
    #[inline]
    pub fn push(self, mv: Move) -> WindowState {
        WindowState {
            bits: ((self.bits << 1) | mv.bit()) & mask(self.width()),
            width: self.width,
        }
    }

    /// Trailing run inside the window; saturates at `width`.
    pub fn trailing_run(&self) -> TrailingRun {
        let newest = self.newest();
        let same = if newest == Move::Up {
            !self.bits
        } else {
            self.bits
        };
        let length = (same.trailing_zeros() as usize).min(self.width());
        TrailingRun {
            direction: newest,
            length: length as u64,
        }
    }
}

#[inline]
fn mask(width: usize) -> u32 {
    if width >= 32 {
        u32::MAX
    } else {
        (1u32 << width) - 1
    }
}

fn check_width(width: usize) -> Result<()> {
    if (1..=MAX_WIDTH).contains(&width) {
        Ok(())
    } else {
        Err(Error::WidthOutOfRange(width))
    }
}

/// Initial lookback window.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub enum InitialCondition {
    /// UP, DOWN, UP, ... with the oldest move UP.
    #[default]
    AlternatingUpFirst,
    AllUp,
    /// Explicit window, oldest first.
    Custom(Vec<Move>),
}

impl InitialCondition {
    pub fn window(&self, width: usize) -> Result<WindowState> {
        initial_window(self, width)
    }
}

pub fn initial_window(kind: &InitialCondition, width: usize) -> Result<WindowState> {
    check_width(width)?;
    let moves: Vec<Move> = match kind {
        InitialCondition::AlternatingUpFirst => (0..width)
            .map(|k| if k % 2 == 0 { Move::Up } else { Move::Down })
            .collect(),
        InitialCondition::AllUp => vec![Move::Up; width],
        InitialCondition::Custom(m) => {
            if m.len() != width {
                return Err(Error::InitLength {
                    expected: width,
                    got: m.len(),
                });
            }
            m.clone()
        }
    };
    WindowState::from_moves(&moves)
}

impl fmt::Display for InitialCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialCondition::AlternatingUpFirst => f.write_str("alternating"),
            InitialCondition::AllUp => f.write_str("all_up"),
            InitialCondition::Custom(m) => {
                f.write_str("custom:")?;
                m.iter().try_for_each(|mv| write!(f, "{}", mv.as_char()))
            }
        }
    }
}

impl FromStr for InitialCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "alternating" | "alternating_up_first" => Ok(InitialCondition::AlternatingUpFirst),
            "all_up" | "all-up" => Ok(InitialCondition::AllUp),
            other => {
                let bad = || Error::Parse {
                    what: "initial condition",
                    value: s.to_string(),
                };
                let body = other.strip_prefix("custom:").ok_or_else(bad)?;
                let moves = body
                    .chars()
                    .map(Move::from_char)
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(bad)?;
                Ok(InitialCondition::Custom(moves))
            }
        }
    }
}

impl Serialize for InitialCondition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for InitialCondition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Descriptor carried alongside a tick series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesMeta {
    pub rule_number: u8,
    pub width: usize,
    pub init: InitialCondition,
    pub policy: RegulationPolicy,
}

/// Realized moves, oldest first. The initial window is not included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TickSeries {
    pub meta: SeriesMeta,
    pub moves: Vec<Move>,
}

impl TickSeries {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Longest run of `direction` in the realized moves.
    pub fn max_run(&self, direction: Move) -> usize {
        let mut best = 0;
        let mut cur = 0;
        for &m in &self.moves {
            cur = if m == direction { cur + 1 } else { 0 };
            best = best.max(cur);
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleReport {
    pub transient_length: u64,
    pub cycle_length: u64,
}

impl CycleReport {
    pub fn total(&self) -> u64 {
        self.transient_length + self.cycle_length
    }
}

/// A configured market: investor, lookback width, initial window, policy.
#[derive(Debug, Clone)]
pub struct Market {
    pub investor: Investor,
    pub width: usize,
    pub init: InitialCondition,
    pub policy: RegulationPolicy,
}

impl Market {
    pub fn new(
        investor: Investor,
        width: usize,
        init: InitialCondition,
        policy: RegulationPolicy,
    ) -> Result<Market> {
        initial_window(&init, width)?;
        Ok(Market {
            investor,
            width,
            init,
            policy,
        })
    }

    pub fn initial_window(&self) -> WindowState {
        initial_window(&self.init, self.width).expect("validated in Market::new")
    }

    pub fn meta(&self) -> SeriesMeta {
        SeriesMeta {
            rule_number: self.investor.rule.number(),
            width: self.width,
            init: self.init.clone(),
            policy: self.policy,
        }
    }

    pub fn simulate(&self, num_ticks: usize) -> TickSeries {
        let window = self.initial_window();
        let run = trailing_run(&window.to_moves());
        TickSeries {
            meta: self.meta(),
            moves: simulate_from(&self.investor, window, run, &self.policy, num_ticks).0,
        }
    }

    pub fn find_cycle(&self) -> Result<CycleReport> {
        find_cycle(&self.investor, self.initial_window(), &self.policy)
    }

    /// Transient plus one full cycle, the natural span of the orbit.
    pub fn simulate_one_cycle(&self) -> Result<(CycleReport, TickSeries)> {
        let report = self.find_cycle()?;
        Ok((report, self.simulate(report.total() as usize)))
    }
}

/// Unregulated intended move.
#[inline]
pub fn next_move(investor: &Investor, window: WindowState) -> Move {
    investor.decide_packed(window.bits(), window.width())
}

/// Run `num_ticks` ticks from an explicit window and trailing run. Returns the
/// realized moves and the final (window, run) so a run can be resumed.
pub fn simulate_from(
    investor: &Investor,
    mut window: WindowState,
    mut run: TrailingRun,
    policy: &RegulationPolicy,
    num_ticks: usize,
) -> (Vec<Move>, WindowState, TrailingRun) {
    let mut moves = Vec::with_capacity(num_ticks);
    for _ in 0..num_ticks {
        let realized = apply(policy, run, next_move(investor, window));
        moves.push(realized);
        window = window.push(realized);
        run = run.extend(realized);
    }
    (moves, window, run)
}

/// One step of the regulated map on window states. Valid when the trend
/// length fits in the window.
#[inline]
pub fn step_window(
    investor: &Investor,
    policy: &RegulationPolicy,
    window: WindowState,
) -> WindowState {
    let realized = apply(policy, window.trailing_run(), next_move(investor, window));
    window.push(realized)
}

fn check_cycle_config(policy: &RegulationPolicy, width: usize) -> Result<()> {
    if !policy.is_none() && policy.trend_length() as usize > width {
        return Err(Error::UnsupportedCycleConfig {
            n: policy.trend_length(),
            w: width,
        });
    }
    Ok(())
}

/// Exact transient and cycle length of the window-state orbit, using a dense
/// first-visit table over all `2^w` states.
pub fn find_cycle(
    investor: &Investor,
    init: WindowState,
    policy: &RegulationPolicy,
) -> Result<CycleReport> {
    CycleFinder::new(init.width())?.run(investor, init, policy)
}

/// Reusable first-visit table; one per worker when surveying many rules.
pub struct CycleFinder {
    width: usize,
    first_visit: Vec<u32>,
}

const UNVISITED: u32 = u32::MAX;

impl CycleFinder {
    pub fn new(width: usize) -> Result<CycleFinder> {
        check_width(width)?;
        Ok(CycleFinder {
            width,
            first_visit: vec![UNVISITED; 1usize << width],
        })
    }

    pub fn run(
        &mut self,
        investor: &Investor,
        init: WindowState,
        policy: &RegulationPolicy,
    ) -> Result<CycleReport> {
        if init.width() != self.width {
            return Err(Error::Domain(format!(
                "window width {} does not match finder width {}",
                init.width(),
                self.width
            )));
        }
        check_cycle_config(policy, self.width)?;

        let mut state = init;
        let mut t: u32 = 0;
        let report = loop {
            let slot = &mut self.first_visit[state.bits() as usize];
            if *slot != UNVISITED {
                break CycleReport {
                    transient_length: u64::from(*slot),
                    cycle_length: u64::from(t - *slot),
                };
            }
            *slot = t;
            t += 1;
            state = step_window(investor, policy, state);
        };

        // clear only what was touched when the walk was short
        if (report.total() as usize) < self.first_visit.len() / 16 {
            let mut s = init;
            for _ in 0..report.total() {
                self.first_visit[s.bits() as usize] = UNVISITED;
                s = step_window(investor, policy, s);
            }
        } else {
            self.first_visit.fill(UNVISITED);
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifa::decode_rule;
    use proptest::prelude::*;

    fn rule54() -> Investor {
        Investor::new(decode_rule(54).unwrap())
    }

    fn constant_up() -> Investor {
        Investor::new(decode_rule(0b0101_0101).unwrap())
    }

    fn passthrough() -> Investor {
        Investor::new(decode_rule(0b0001_1011).unwrap())
    }

    /// Floyd tortoise-and-hare on the same map, no table.
    fn floyd(investor: &Investor, policy: &RegulationPolicy, x0: WindowState) -> CycleReport {
        let f = |s| step_window(investor, policy, s);
        let mut tortoise = f(x0);
        let mut hare = f(f(x0));
        while tortoise != hare {
            tortoise = f(tortoise);
            hare = f(f(hare));
        }
        let mut mu = 0;
        tortoise = x0;
        while tortoise != hare {
            tortoise = f(tortoise);
            hare = f(hare);
            mu += 1;
        }
        let mut lam = 1;
        hare = f(tortoise);
        while tortoise != hare {
            hare = f(hare);
            lam += 1;
        }
        CycleReport {
            transient_length: mu,
            cycle_length: lam,
        }
    }

    #[test]
    fn initial_windows() {
        use Move::{Down, Up};
        assert_eq!(
            initial_window(&InitialCondition::AlternatingUpFirst, 4)
                .unwrap()
                .to_moves(),
            vec![Up, Down, Up, Down]
        );
        assert_eq!(
            initial_window(&InitialCondition::AllUp, 3)
                .unwrap()
                .to_moves(),
            vec![Up, Up, Up]
        );
        assert_eq!(
            initial_window(&InitialCondition::Custom(vec![Down]), 1)
                .unwrap()
                .to_moves(),
            vec![Down]
        );
        assert!(matches!(
            initial_window(&InitialCondition::Custom(vec![Down, Up]), 3),
            Err(Error::InitLength {
                expected: 3,
                got: 2
            })
        ));
        assert!(initial_window(&InitialCondition::AllUp, 0).is_err());
        assert!(initial_window(&InitialCondition::AllUp, 31).is_err());
    }

    #[test]
    fn init_literals_round_trip() {
        for s in ["alternating", "all_up", "custom:UDDU"] {
            assert_eq!(s.parse::<InitialCondition>().unwrap().to_string(), s);
        }
        assert!("custom:UXD".parse::<InitialCondition>().is_err());
        assert!("zigzag".parse::<InitialCondition>().is_err());
    }

    #[test]
    fn window_packing_convention() {
        use Move::{Down, Up};
        let w = WindowState::from_moves(&[Up, Down, Down]).unwrap();
        assert_eq!(w.bits(), 0b100);
        assert_eq!(w.newest(), Down);
        let w2 = w.push(Up);
        assert_eq!(w2.to_moves(), vec![Down, Down, Up]);
        assert_eq!(
            w.trailing_run(),
            TrailingRun {
                direction: Down,
                length: 2
            }
        );
        let all = WindowState::from_moves(&[Up; 5]).unwrap();
        assert_eq!(all.trailing_run().length, 5);
    }

    #[test]
    fn next_move_examples() {
        let alt = initial_window(&InitialCondition::AlternatingUpFirst, 22).unwrap();
        assert_eq!(next_move(&constant_up(), alt), Move::Up);
        let ends_down = WindowState::from_moves(&[Move::Down, Move::Up, Move::Down]).unwrap();
        // newest-first pass ends on the oldest cell
        assert_eq!(next_move(&passthrough(), ends_down), Move::Down);
        // oldest xor second-oldest = UP xor DOWN
        assert_eq!(next_move(&rule54(), alt), Move::Up);
    }

    #[test]
    fn zero_ticks_is_empty() {
        let m = Market::new(
            rule54(),
            22,
            InitialCondition::default(),
            RegulationPolicy::NONE,
        )
        .unwrap();
        assert!(m.simulate(0).is_empty());
    }

    #[test]
    fn rule_54_is_a_shift_register() {
        // realized move = move 22 ticks ago xor move 21 ticks ago
        let m = Market::new(
            rule54(),
            22,
            InitialCondition::default(),
            RegulationPolicy::NONE,
        )
        .unwrap();
        let mut all = m.initial_window().to_moves();
        all.extend(m.simulate(5000).moves);
        for t in 22..all.len() {
            assert_eq!(all[t].bit(), all[t - 22].bit() ^ all[t - 21].bit());
        }
    }

    #[test]
    fn constant_rule_fixed_point() {
        for w in [1, 5, 12] {
            for init in [
                InitialCondition::AllUp,
                InitialCondition::AlternatingUpFirst,
            ] {
                let m = Market::new(constant_up(), w, init, RegulationPolicy::NONE).unwrap();
                assert_eq!(m.find_cycle().unwrap().cycle_length, 1);
            }
        }
    }

    #[test]
    fn cycle_config_rejected_when_trend_exceeds_window() {
        let m = Market::new(
            rule54(),
            8,
            InitialCondition::default(),
            RegulationPolicy::prick(9).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            m.find_cycle(),
            Err(Error::UnsupportedCycleConfig { n: 9, w: 8 })
        ));
        // simulate still works: the run counter covers the whole history
        assert!(m.simulate(100).max_run(Move::Up) <= 9);
    }

    #[test]
    fn prick_trims_up_runs() {
        let m = Market::new(
            rule54(),
            22,
            InitialCondition::default(),
            RegulationPolicy::prick(3).unwrap(),
        )
        .unwrap();
        assert!(m.simulate(200_000).max_run(Move::Up) <= 3);
    }

    #[test]
    fn finder_reuse_matches_fresh() {
        let mut finder = CycleFinder::new(12).unwrap();
        for k in [54u32, 45, 0, 85, 201, 120, 7] {
            let inv = Investor::new(decode_rule(k).unwrap());
            let init = initial_window(&InitialCondition::AllUp, 12).unwrap();
            let reused = finder.run(&inv, init, &RegulationPolicy::NONE).unwrap();
            assert_eq!(
                reused,
                find_cycle(&inv, init, &RegulationPolicy::NONE).unwrap()
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn window_round_trip(bits in any::<u32>(), width in 1usize..=30) {
            let w = WindowState::new(bits, width).unwrap();
            prop_assert_eq!(WindowState::from_moves(&w.to_moves()).unwrap(), w);
        }

        #[test]
        fn table_agrees_with_floyd(rule in 0u32..256, width in 1usize..=12, regime in 0u8..4, n in 1u32..=12, init_bits in any::<u32>()) {
            let n = n.min(width as u32);
            let policy = match regime {
                0 => RegulationPolicy::NONE,
                1 => RegulationPolicy::prick(n).unwrap(),
                2 => RegulationPolicy::prop(n).unwrap(),
                _ => RegulationPolicy::both(n).unwrap(),
            };
            let inv = Investor::new(decode_rule(rule).unwrap());
            let init = WindowState::new(init_bits, width).unwrap();
            let report = find_cycle(&inv, init, &policy).unwrap();
            prop_assert_eq!(report, floyd(&inv, &policy, init));
            prop_assert!(report.cycle_length >= 1);
            prop_assert!(report.total() <= 1u64 << width);
        }

        #[test]
        fn restart_reproduces_suffix(rule in 0u32..256, split in 0usize..300, regime in 0u8..3, n in 1u32..8) {
            let policy = match regime {
                0 => RegulationPolicy::NONE,
                1 => RegulationPolicy::prick(n).unwrap(),
                _ => RegulationPolicy::prop(n).unwrap(),
            };
            let m = Market::new(Investor::new(decode_rule(rule).unwrap()), 10, InitialCondition::default(), policy).unwrap();
            let full = m.simulate(400).moves;
            let w0 = m.initial_window();
            let (head, w, _) = simulate_from(&m.investor, w0, trailing_run(&w0.to_moves()), &policy, split);
            // restart from the window alone; n <= w so the run is recoverable
            let (tail, _, _) = simulate_from(&m.investor, w, w.trailing_run(), &policy, 400 - split);
            prop_assert_eq!(&full[..split], &head[..]);
            prop_assert_eq!(&full[split..], &tail[..]);
        }
    }
}
