//! Tick-series file formats.
//!
//! Bit stream: an ASCII header of `key=value` lines after the magic line
//! `REGSIM-TICKS v1`, terminated by an empty line, followed by `ceil(ticks / 8)`
//! bytes. Ticks are packed oldest first, most significant bit first within
//! each byte, so the newest tick is last; UP = 1. Unused low bits of the final
//! byte are zero.
//!
//! Run-length text: the same header keys as `# key=value` comment lines, then
//! one `U <len>` or `D <len>` line per maximal run.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::ifa::Move;
use crate::market::{SeriesMeta, TickSeries};

const MAGIC: &str = "REGSIM-TICKS v1";

fn header_pairs(series: &TickSeries) -> Vec<(&str, String)> {
    vec![
        ("rule", series.meta.rule_number.to_string()),
        ("w", series.meta.width.to_string()),
        ("policy", series.meta.policy.to_string()),
        ("init", series.meta.init.to_string()),
        ("ticks", series.moves.len().to_string()),
    ]
}

struct Header {
    meta: SeriesMeta,
    ticks: usize,
}

fn parse_header<'a>(pairs: impl Iterator<Item = &'a str>) -> Result<Header> {
    let mut rule = None;
    let mut width = None;
    let mut policy = None;
    let mut init = None;
    let mut ticks = None;
    for line in pairs {
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            what: "header line",
            value: line.to_string(),
        })?;
        let num = |what| {
            v.trim().parse::<usize>().map_err(|_| Error::Parse {
                what,
                value: v.to_string(),
            })
        };
        match k.trim() {
            "rule" => rule = Some(num("rule")?),
            "w" => width = Some(num("w")?),
            "ticks" => ticks = Some(num("ticks")?),
            "policy" => policy = Some(v.parse()?),
            "init" => init = Some(v.parse()?),
            _ => {}
        }
    }
    let missing = |key: &str| Error::Domain(format!("tick file header is missing `{key}`"));
    let rule = rule.ok_or_else(|| missing("rule"))?;
    if rule > 255 {
        return Err(Error::RuleOutOfRange(rule as u32));
    }
    Ok(Header {
        meta: SeriesMeta {
            rule_number: rule as u8,
            width: width.ok_or_else(|| missing("w"))?,
            policy: policy.ok_or_else(|| missing("policy"))?,
            init: init.ok_or_else(|| missing("init"))?,
        },
        ticks: ticks.ok_or_else(|| missing("ticks"))?,
    })
}

/// Write the bit format. `extra` pairs follow the standard header keys; they
/// must not contain newlines and are ignored by the readers.
pub fn write_bits<W: Write>(
    series: &TickSeries,
    extra: &[(&str, String)],
    mut out: W,
) -> Result<()> {
    writeln!(out, "{MAGIC}")?;
    for (k, v) in header_pairs(series).iter().chain(extra) {
        writeln!(out, "{k}={v}")?;
    }
    writeln!(out)?;
    let mut packed = vec![0u8; series.moves.len().div_ceil(8)];
    for (i, m) in series.moves.iter().enumerate() {
        if *m == Move::Up {
            packed[i / 8] |= 0x80 >> (i % 8);
        }
    }
    out.write_all(&packed)?;
    Ok(())
}

pub fn read_bits(bytes: &[u8]) -> Result<TickSeries> {
    let mut lines = Vec::new();
    let mut pos = 0;
    loop {
        let end = bytes[pos..]
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| Error::Domain("tick file header is not terminated".into()))?;
        let line = std::str::from_utf8(&bytes[pos..pos + end])
            .map_err(|_| Error::Domain("tick file header is not UTF-8".into()))?;
        pos += end + 1;
        if line.is_empty() {
            break;
        }
        lines.push(line);
    }
    if lines.first() != Some(&MAGIC) {
        return Err(Error::Domain(format!("missing `{MAGIC}` magic line")));
    }
    let header = parse_header(lines[1..].iter().copied())?;
    let payload = &bytes[pos..];
    if payload.len() != header.ticks.div_ceil(8) {
        return Err(Error::Domain(format!(
            "payload has {} bytes, header declares {} ticks",
            payload.len(),
            header.ticks
        )));
    }
    let moves = (0..header.ticks)
        .map(|i| Move::from_bit(u32::from(payload[i / 8] >> (7 - i % 8))))
        .collect();
    Ok(TickSeries {
        meta: header.meta,
        moves,
    })
}

pub fn write_rle<W: Write>(
    series: &TickSeries,
    extra: &[(&str, String)],
    mut out: W,
) -> Result<()> {
    writeln!(out, "# {MAGIC} run-length")?;
    for (k, v) in header_pairs(series).iter().chain(extra) {
        writeln!(out, "# {k}={v}")?;
    }
    let mut iter = series.moves.iter().peekable();
    while let Some(&m) = iter.next() {
        let mut len = 1usize;
        while iter.next_if(|&&n| n == m).is_some() {
            len += 1;
        }
        writeln!(out, "{} {len}", m.as_char())?;
    }
    Ok(())
}

pub fn read_rle<R: BufRead>(input: R) -> Result<TickSeries> {
    let mut header_lines = Vec::new();
    let mut moves = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if comment.contains('=') {
                header_lines.push(comment.trim().to_string());
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let bad = || Error::Row {
            row: idx + 1,
            msg: format!("expected `U <len>` or `D <len>`, got {line:?}"),
        };
        let (sym, len) = line.split_once(' ').ok_or_else(bad)?;
        let mv = sym
            .chars()
            .next()
            .filter(|_| sym.len() == 1)
            .and_then(Move::from_char)
            .ok_or_else(bad)?;
        let len: usize = len.trim().parse().map_err(|_| bad())?;
        moves.extend(std::iter::repeat_n(mv, len));
    }
    let header = parse_header(header_lines.iter().map(String::as_str))?;
    if header.ticks != moves.len() {
        return Err(Error::Domain(format!(
            "runs cover {} ticks, header declares {}",
            moves.len(),
            header.ticks
        )));
    }
    Ok(TickSeries {
        meta: header.meta,
        moves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifa::{decode_rule, Investor};
    use crate::market::{InitialCondition, Market};
    use proptest::prelude::*;

    fn series(ticks: usize, policy: &str) -> TickSeries {
        Market::new(
            Investor::new(decode_rule(54).unwrap()),
            22,
            InitialCondition::AlternatingUpFirst,
            policy.parse().unwrap(),
        )
        .unwrap()
        .simulate(ticks)
    }

    #[test]
    fn bit_layout() {
        let s = series(10, "none");
        let mut buf = Vec::new();
        write_bits(&s, &[], &mut buf).unwrap();
        let text = String::from_utf8_lossy(&buf);
        assert!(text.starts_with(
            "REGSIM-TICKS v1\nrule=54\nw=22\npolicy=none\ninit=alternating\nticks=10\n\n"
        ));
        let payload = &buf[buf.len() - 2..];
        let expect: Vec<u8> = (0..10)
            .map(|i| (payload[i / 8] >> (7 - i % 8)) & 1)
            .collect();
        assert_eq!(
            expect,
            s.moves.iter().map(|m| m.bit() as u8).collect::<Vec<_>>()
        );
        assert_eq!(payload[1] & 0x3f, 0);
    }

    #[test]
    fn rle_layout() {
        let mut s = series(0, "prick:3");
        s.moves = vec![Move::Up, Move::Up, Move::Down, Move::Up];
        let mut buf = Vec::new();
        write_rle(&s, &[], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.ends_with("# ticks=4\nU 2\nD 1\nU 1\n"), "{text}");
        assert!(text.contains("# policy=prick:3\n"));
    }

    #[test]
    fn truncated_payload_rejected() {
        let s = series(17, "none");
        let mut buf = Vec::new();
        write_bits(&s, &[], &mut buf).unwrap();
        buf.pop();
        assert!(read_bits(&buf).is_err());
    }

    #[test]
    fn bad_rle_line_names_row() {
        let text = "# rule=54\n# w=22\n# policy=none\n# init=alternating\n# ticks=3\nU 2\nX 1\n";
        match read_rle(text.as_bytes()) {
            Err(Error::Row { row: 7, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn both_formats_round_trip(ticks in 0usize..3000, n in 2u32..8) {
            let s = series(ticks, &format!("prop:{n}"));
            let mut bits = Vec::new();
            write_bits(&s, &[], &mut bits).unwrap();
            prop_assert_eq!(read_bits(&bits).unwrap(), s.clone());
            let mut rle = Vec::new();
            write_rle(&s, &[], &mut rle).unwrap();
            prop_assert_eq!(read_rle(&rle[..]).unwrap(), s);
        }
    }
}
