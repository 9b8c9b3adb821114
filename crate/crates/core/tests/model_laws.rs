mod common;

use std::collections::BTreeSet;

use netabc::netmodel::{simulate, NetworkState, Pair, ParamSet};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn check_degrees(state: &NetworkState) {
    let present: BTreeSet<_> = state.nodes().iter().copied().collect();
    for &v in state.nodes() {
        if let Some(u) = state.steady_partner(v) {
            assert_ne!(u, v);
            assert!(present.contains(&u), "steady partner {u:?} of {v:?} is absent");
            assert_eq!(state.steady_partner(u), Some(v));
        }
        if let Some(u) = state.casual_partner(v) {
            assert_ne!(u, v);
            assert!(present.contains(&u));
            assert_eq!(state.casual_partner(u), Some(v));
        }
    }
    let steady_ends = state.steady_edges().count() * 2;
    let with_steady = state.nodes().iter().filter(|&&v| state.steady_partner(v).is_some()).count();
    assert_eq!(steady_ends, with_steady);
    let with_casual = state.nodes().iter().filter(|&&v| state.casual_partner(v).is_some()).count();
    assert_eq!(state.casual_edges().len() * 2, with_casual);
}

#[test]
fn degree_invariants_hold_over_many_steps() {
    let params = ParamSet { rho: 0.3, sigma: 0.1, omega0: 0.4, omega1: 0.2, mu: 0.01, n: 100 };
    let mut state = NetworkState::new(params.n).unwrap();
    let mut rng = common::rng(1, 0);
    for _ in 0..100_000 {
        state.step(&params, &mut rng);
        check_degrees(&state);
    }
    assert_eq!(state.iteration(), 100_000);
}

#[test]
fn casual_edges_last_exactly_one_iteration() {
    let params = ParamSet { rho: 0.5, sigma: 0.2, omega0: 0.6, omega1: 0.4, mu: 0.0, n: 200 };
    let mut state = NetworkState::new(params.n).unwrap();
    let mut rng = common::rng(2, 0);
    for _ in 0..2_000 {
        let rec = state.step(&params, &mut rng);
        let formed: BTreeSet<Pair> = rec.casual_formed.iter().map(|c| c.pair).collect();
        let live: BTreeSet<Pair> = state.casual_edges().iter().copied().collect();
        assert_eq!(formed, live);
    }
}

#[test]
fn population_is_constant_without_migration() {
    let params = ParamSet { mu: 0.0, ..ParamSet::REFERENCE.with_n(300) };
    let mut state = NetworkState::new(params.n).unwrap();
    let mut rng = common::rng(3, 0);
    for _ in 0..5_000 {
        let rec = state.step(&params, &mut rng);
        assert!(rec.departures.is_empty() && rec.arrivals.is_empty());
        assert_eq!(state.nodes().len(), 300);
    }
}

/// Durations of steady spells that began inside the first half of a long
/// recorded span; spells started before recording would be length-biased.
fn completed_durations(sigma: f64, seed: u64) -> Vec<u64> {
    let params = ParamSet { rho: 0.5, sigma, omega0: 0.1, omega1: 0.1, mu: 0.0, n: 1000 };
    let span = 2_000;
    let traj = simulate(&params, 100, span, &mut common::rng(seed, 0)).unwrap();
    let first = traj.log.first_iteration();
    let cutoff = first + span / 2;
    traj.log
        .records
        .iter()
        .flat_map(|r| r.steady_dissolved.iter())
        .filter(|d| d.start >= first && d.start < cutoff)
        .map(|d| d.duration())
        .collect()
}

#[test]
fn steady_durations_are_geometric() {
    for (sigma, seed) in [(0.1, 10), (0.5, 11)] {
        let d = completed_durations(sigma, seed);
        assert!(d.len() >= 10_000, "only {} spells for sigma {sigma}", d.len());
        let mean = d.iter().sum::<u64>() as f64 / d.len() as f64;
        let expected = 1.0 / sigma;
        assert!(
            (mean - expected).abs() < 0.05 * expected,
            "sigma {sigma}: mean {mean} vs {expected}"
        );
        assert!(d.iter().all(|&x| x >= 1));

        // chi-square on durations 1..=20 with a pooled tail
        let n = d.len() as f64;
        let mut observed = [0f64; 21];
        for &x in &d {
            observed[(x.min(21) - 1) as usize] += 1.0;
        }
        let mut stat = 0.0;
        let mut cells = 0;
        for (k, &o) in observed.iter().enumerate() {
            let p = if k < 20 {
                (1.0 - sigma).powi(k as i32) * sigma
            } else {
                (1.0 - sigma).powi(20)
            };
            let e = n * p;
            if e >= 5.0 {
                stat += (o - e).powi(2) / e;
                cells += 1;
            }
        }
        let df = (cells - 1) as f64;
        let p = 1.0 - ChiSquared::new(df).unwrap().cdf(stat);
        assert!(p > 1e-4, "sigma {sigma}: chi-square {stat} on {df} df, p = {p}");
    }
}

#[test]
fn replayed_log_matches_live_state() {
    let params = ParamSet { mu: 0.02, ..ParamSet::REFERENCE.with_n(150) };
    let traj = simulate(&params, 50, 300, &mut common::rng(4, 0)).unwrap();
    let last = traj.log.replay().last().unwrap();
    assert_eq!(last, traj.final_state.snapshot());
}
