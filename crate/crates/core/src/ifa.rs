//! Two-state, two-symbol iterated finite automata and their canonical numbering.
//!
//! A rule is a total map `(state, symbol) -> (next_state, output)`. Rules are
//! numbered 0..=255 by writing the images of the pairs `(0,0), (0,1), (1,0),
//! (1,1)` as base-4 digits, most significant first, with
//! `digit = 2 * next_state + output`. Rule 54 has digits `(0, 3, 1, 2)`.
//!
//! The investor reads the lookback window once per tick. Under the default
//! [`IfaConvention`] the pass runs from the newest move back to the oldest,
//! starts in state 0, and the output emitted at the last cell read is the
//! trade. That is the convention under which rule 54 at width 22 has an orbit
//! of 4,194,303 ticks.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One market movement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Move {
    Down = 0,
    Up = 1,
}

impl Move {
    #[inline]
    pub fn from_bit(bit: u32) -> Move {
        if bit & 1 == 1 {
            Move::Up
        } else {
            Move::Down
        }
    }

    #[inline]
    pub fn bit(self) -> u32 {
        self as u32
    }

    /// Swap UP and DOWN.
    #[inline]
    pub fn mirror(self) -> Move {
        match self {
            Move::Up => Move::Down,
            Move::Down => Move::Up,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Move::Up => 'U',
            Move::Down => 'D',
        }
    }

    pub fn from_char(c: char) -> Option<Move> {
        match c {
            'U' | 'u' | '1' => Some(Move::Up),
            'D' | 'd' | '0' => Some(Move::Down),
            _ => None,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Move::Up => "UP",
            Move::Down => "DOWN",
        })
    }
}

/// Image of one `(state, symbol)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transition {
    next_state: u8,
    output: u8,
}

impl Transition {
    pub fn new(next_state: u8, output: u8) -> Result<Transition> {
        if next_state > 1 || output > 1 {
            return Err(Error::Domain(format!(
                "transition ({next_state}, {output}) is not binary"
            )));
        }
        Ok(Transition { next_state, output })
    }

    pub fn next_state(self) -> u8 {
        self.next_state
    }

    pub fn output(self) -> u8 {
        self.output
    }

    fn digit(self) -> u8 {
        2 * self.next_state + self.output
    }

    fn from_digit(d: u8) -> Transition {
        Transition {
            next_state: (d >> 1) & 1,
            output: d & 1,
        }
    }
}

/// A two-state two-symbol IFA transition table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IfaRule {
    // indexed by 2 * state + symbol
    table: [Transition; 4],
}

impl IfaRule {
    /// Build a rule from its four images, ordered `(0,0), (0,1), (1,0), (1,1)`.
    pub fn from_table(table: [Transition; 4]) -> IfaRule {
        IfaRule { table }
    }

    #[inline]
    pub fn transition(&self, state: u8, symbol: u8) -> Transition {
        self.table[usize::from(2 * (state & 1) + (symbol & 1))]
    }

    pub fn table(&self) -> [Transition; 4] {
        self.table
    }

    pub fn number(&self) -> u8 {
        encode_rule(self)
    }

    /// The same machine with state labels 0 and 1 swapped. For `w >= 2` and a
    /// rule whose next state ignores the current state, both produce the
    /// same decisions.
    pub fn relabel_states(&self) -> IfaRule {
        let mut table = [Transition::from_digit(0); 4];
        for state in 0..2u8 {
            for symbol in 0..2u8 {
                let t = self.transition(1 - state, symbol);
                table[usize::from(2 * state + symbol)] = Transition {
                    next_state: 1 - t.next_state,
                    output: t.output,
                };
            }
        }
        IfaRule { table }
    }
}

/// Decode a canonical rule number.
pub fn decode_rule(rule_number: u32) -> Result<IfaRule> {
    if rule_number > 255 {
        return Err(Error::RuleOutOfRange(rule_number));
    }
    let mut table = [Transition::from_digit(0); 4];
    for (pair, slot) in table.iter_mut().enumerate() {
        let shift = 2 * (3 - pair);
        *slot = Transition::from_digit(((rule_number >> shift) & 3) as u8);
    }
    Ok(IfaRule { table })
}

pub fn encode_rule(rule: &IfaRule) -> u8 {
    rule.table.iter().fold(0u8, |acc, t| (acc << 2) | t.digit())
}

/// All 256 rules in ascending rule-number order.
pub fn enumerate_rules() -> Vec<IfaRule> {
    (0..256u32)
        .map(|k| decode_rule(k).expect("in range"))
        .collect()
}

/// Order in which the automaton visits the lookback window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PassOrder {
    /// Most recent move first, oldest move last.
    #[default]
    NewestFirst,
    OldestFirst,
}

/// What the pass returns as the trade.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    /// Output symbol emitted at the last cell visited.
    #[default]
    FinalOutput,
    /// Automaton state after the last cell.
    FinalState,
}

/// How a window pass is run and read out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IfaConvention {
    pub pass: PassOrder,
    pub initial_state: u8,
    pub decision: Decision,
}

impl Default for IfaConvention {
    fn default() -> Self {
        IfaConvention {
            pass: PassOrder::NewestFirst,
            initial_state: 0,
            decision: Decision::FinalOutput,
        }
    }
}

/// Run one pass over `window` (oldest first) and return the trade.
pub fn process_window(rule: &IfaRule, window: &[Move], convention: IfaConvention) -> Result<Move> {
    if window.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let cells: Box<dyn Iterator<Item = &Move>> = match convention.pass {
        PassOrder::OldestFirst => Box::new(window.iter()),
        PassOrder::NewestFirst => Box::new(window.iter().rev()),
    };
    let mut state = convention.initial_state & 1;
    let mut output = 0u8;
    for cell in cells {
        let t = rule.transition(state, cell.bit() as u8);
        state = t.next_state;
        output = t.output;
    }
    Ok(Move::from_bit(u32::from(match convention.decision {
        Decision::FinalOutput => output,
        Decision::FinalState => state,
    })))
}

/// A rule paired with the convention it is read under. This is the
/// representative investor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Investor {
    pub rule: IfaRule,
    pub convention: IfaConvention,
}

impl Investor {
    pub fn new(rule: IfaRule) -> Investor {
        Investor {
            rule,
            convention: IfaConvention::default(),
        }
    }

    pub fn with_convention(rule: IfaRule, convention: IfaConvention) -> Investor {
        Investor { rule, convention }
    }

    /// Decision for a packed window where bit `i` holds the move of age `i`
    /// (bit 0 is the newest). Same result as [`process_window`] on the
    /// unpacked window.
    #[inline]
    pub fn decide_packed(&self, bits: u32, width: usize) -> Move {
        debug_assert!(width >= 1);
        let mut state = self.convention.initial_state & 1;
        let mut output = 0u8;
        let mut step = |age: usize| {
            let t = self.rule.transition(state, ((bits >> age) & 1) as u8);
            state = t.next_state;
            output = t.output;
        };
        match self.convention.pass {
            PassOrder::NewestFirst => (0..width).for_each(&mut step),
            PassOrder::OldestFirst => (0..width).rev().for_each(&mut step),
        }
        Move::from_bit(u32::from(match self.convention.decision {
            Decision::FinalOutput => output,
            Decision::FinalState => state,
        }))
    }
}
