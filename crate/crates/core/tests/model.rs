//! End-to-end properties of the tick process checked against unpacked,
//! brute-force recomputation.

use std::collections::HashMap;

use regsim::survey::{classify_rule, survey_rules, sweep_window, OrbitClass, Thresholds};
use regsim::{
    apply, decode_rule, process_window, trailing_run, IfaConvention, InitialCondition, Investor,
    Market, Move, RegulationPolicy,
};

fn rule54() -> Investor {
    Investor::new(decode_rule(54).unwrap())
}

/// Simulate on a plain `Vec<Move>` history, one full window pass per tick.
fn naive_moves(
    inv: &Investor,
    init: &[Move],
    policy: &RegulationPolicy,
    ticks: usize,
) -> Vec<Move> {
    let w = init.len();
    let mut hist = init.to_vec();
    for _ in 0..ticks {
        let window = &hist[hist.len() - w..];
        let intended = process_window(&inv.rule, window, inv.convention).unwrap();
        let realized = apply(policy, trailing_run(&hist), intended);
        hist.push(realized);
    }
    hist.split_off(w)
}

/// First repeat of the window under the naive process, keyed by the window
/// contents and the trailing run it implies.
fn naive_cycle(inv: &Investor, init: &[Move], policy: &RegulationPolicy) -> (u64, u64) {
    let w = init.len();
    let mut hist = init.to_vec();
    let mut seen = HashMap::new();
    for t in 0u64.. {
        let window = hist[hist.len() - w..].to_vec();
        if let Some(first) = seen.insert(window.clone(), t) {
            return (first, t - first);
        }
        let intended = process_window(&inv.rule, &window, inv.convention).unwrap();
        hist.push(apply(policy, trailing_run(&window), intended));
    }
    unreachable!()
}

#[test]
fn packed_simulation_matches_naive() {
    for policy in ["none", "prick:3", "prop:5", "both:2"] {
        let policy: RegulationPolicy = policy.parse().unwrap();
        for w in [5usize, 9, 22] {
            let m = Market::new(rule54(), w, InitialCondition::AlternatingUpFirst, policy).unwrap();
            let init = m.initial_window().to_moves();
            assert_eq!(
                m.simulate(3000).moves,
                naive_moves(&rule54(), &init, &policy, 3000)
            );
        }
    }
}

#[test]
fn cycle_finder_matches_brute_force() {
    for rule in [30u32, 45, 54, 99, 110, 150, 201] {
        let inv = Investor::new(decode_rule(rule).unwrap());
        for w in 3..=12 {
            for policy in ["none", "prick:2", "prop:3", "both:3"] {
                let policy: RegulationPolicy = policy.parse().unwrap();
                let m = Market::new(inv, w, InitialCondition::AllUp, policy).unwrap();
                let r = m.find_cycle().unwrap();
                let init = m.initial_window().to_moves();
                assert_eq!(
                    (r.transient_length, r.cycle_length),
                    naive_cycle(&inv, &init, &policy),
                    "rule {rule} w {w} {policy}"
                );
            }
        }
    }
}

#[test]
fn unregulated_orbit_at_width_22_is_exactly_2_pow_22_minus_1() {
    let m = Market::new(
        rule54(),
        22,
        InitialCondition::AlternatingUpFirst,
        RegulationPolicy::NONE,
    )
    .unwrap();
    let r = m.find_cycle().unwrap();
    assert_eq!((r.transient_length, r.cycle_length), (0, 4_194_303));

    // 4194303 = 3 * 23 * 89 * 683: the window returns after c ticks and after
    // no proper divisor c / p
    let start = m.initial_window().to_moves();
    let moves = m.simulate(4_194_303).moves;
    let window_after = |t: usize| -> Vec<Move> {
        let mut h = start.clone();
        h.extend_from_slice(&moves[..t]);
        h[h.len() - 22..].to_vec()
    };
    assert_eq!(window_after(4_194_303), start);
    for p in [3usize, 23, 89, 683] {
        assert_ne!(window_after(4_194_303 / p), start, "period divides c/{p}");
    }
}

#[test]
fn regulated_orbits_are_shorter() {
    for n in 2..=6 {
        for regime in ["prick", "prop"] {
            let policy: RegulationPolicy = format!("{regime}:{n}").parse().unwrap();
            let m =
                Market::new(rule54(), 22, InitialCondition::AlternatingUpFirst, policy).unwrap();
            assert!(m.find_cycle().unwrap().cycle_length < 4_194_303, "{policy}");
        }
    }
}

#[test]
fn prick_runs_are_bounded() {
    for n in 2..=8 {
        let policy = RegulationPolicy::prick(n).unwrap();
        let m = Market::new(rule54(), 22, InitialCondition::AlternatingUpFirst, policy).unwrap();
        assert!(m.simulate(1 << 20).max_run(Move::Up) <= n as usize);
    }
}

#[test]
fn simulation_is_deterministic_and_resumable() {
    let policy = RegulationPolicy::prop(4).unwrap();
    let m = Market::new(rule54(), 22, InitialCondition::AlternatingUpFirst, policy).unwrap();
    let a = m.simulate(50_000);
    let b = m.simulate(50_000);
    assert_eq!(a, b);
    assert_eq!(m.simulate(20_000).moves[..], a.moves[..20_000]);
}

#[test]
fn both_equals_prick_for_rule_54() {
    // the process never produces a long enough DOWN run to trip the prop side
    for n in [2u32, 3, 6, 11] {
        let prick = Market::new(
            rule54(),
            22,
            InitialCondition::AlternatingUpFirst,
            RegulationPolicy::prick(n).unwrap(),
        )
        .unwrap();
        let both = Market {
            policy: RegulationPolicy::both(n).unwrap(),
            ..prick.clone()
        };
        assert_eq!(
            prick.simulate(1 << 21).moves,
            both.simulate(1 << 21).moves,
            "n = {n}"
        );
    }
}

#[test]
fn rule_201_is_54_with_states_swapped() {
    let r54 = decode_rule(54).unwrap();
    let r201 = decode_rule(201).unwrap();
    assert_eq!(r54.relabel_states(), r201);
    let a = Market::new(
        Investor::new(r54),
        22,
        InitialCondition::AlternatingUpFirst,
        RegulationPolicy::NONE,
    )
    .unwrap();
    let b = Market {
        investor: Investor::new(r201),
        ..a.clone()
    };
    assert_eq!(a.simulate(200_000).moves, b.simulate(200_000).moves);
}

#[test]
fn survey_at_width_12_singles_out_54_and_201() {
    let rows = survey_rules(
        12,
        &InitialCondition::AllUp,
        &Thresholds::default(),
        IfaConvention::default(),
    )
    .unwrap();
    let complex: Vec<u8> = rows
        .iter()
        .filter(|r| r.class == OrbitClass::Complex)
        .map(|r| r.rule_number)
        .collect();
    assert_eq!(complex, vec![54, 201]);
    assert_eq!(rows[54].cycle_length, 3255);
}

#[test]
fn sweep_reports_each_width() {
    let rows = sweep_window(
        &rule54(),
        2..=14,
        &InitialCondition::AllUp,
        &Thresholds::default(),
    )
    .unwrap();
    let widths: Vec<usize> = rows.iter().map(|r| r.width).collect();
    assert_eq!(widths, (2..=14).collect::<Vec<_>>());
    for r in &rows {
        let again = classify_rule(
            &rule54(),
            r.width,
            &InitialCondition::AllUp,
            &Thresholds::default(),
        )
        .unwrap();
        assert_eq!(&again, r);
        assert!(r.cycle_length < 1 << r.width);
    }
}
