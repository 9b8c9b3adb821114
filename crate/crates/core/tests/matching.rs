mod common;

use std::collections::BTreeMap;

use netabc::netmodel::{match_pairs, NodeId, Pair};

/// Pair and exclusion probabilities for a uniform shuffle followed by
/// consecutive pairing, by enumerating every ordering.
fn enumerate(n: u32) -> (BTreeMap<Pair, f64>, BTreeMap<NodeId, f64>) {
    fn perms(items: Vec<u32>) -> Vec<Vec<u32>> {
        if items.len() <= 1 {
            return vec![items];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.clone();
            let head = rest.remove(i);
            for mut p in perms(rest) {
                p.insert(0, head);
                out.push(p);
            }
        }
        out
    }
    let all = perms((0..n).collect());
    let w = 1.0 / all.len() as f64;
    let mut pairs = BTreeMap::new();
    let mut excluded = BTreeMap::new();
    for p in &all {
        for c in p.chunks(2) {
            match c {
                [a, b] => *pairs.entry(Pair::new(NodeId(*a), NodeId(*b))).or_insert(0.0) += w,
                [a] => *excluded.entry(NodeId(*a)).or_insert(0.0) += w,
                _ => unreachable!(),
            }
        }
    }
    (pairs, excluded)
}

#[test]
fn five_willing_nodes_are_matched_fairly() {
    let nodes: Vec<NodeId> = (0..5).map(NodeId).collect();
    let (pair_p, excl_p) = enumerate(5);
    assert_eq!(pair_p.len(), 10);

    let trials = 10_000;
    let mut pair_count: BTreeMap<Pair, f64> = BTreeMap::new();
    let mut excl_count: BTreeMap<NodeId, f64> = BTreeMap::new();
    for seed in 0..trials {
        let pairs = match_pairs(&nodes, &mut common::rng(seed, 0));
        assert_eq!(pairs.len(), 2);
        let mut left: Vec<NodeId> = nodes.clone();
        for p in &pairs {
            *pair_count.entry(*p).or_insert(0.0) += 1.0;
            left.retain(|v| !p.contains(*v));
        }
        assert_eq!(left.len(), 1);
        *excl_count.entry(left[0]).or_insert(0.0) += 1.0;
    }
    let t = trials as f64;
    for v in &nodes {
        let f = excl_count.get(v).copied().unwrap_or(0.0) / t;
        assert!((f - 0.2).abs() <= 0.02, "node {v:?} excluded {f}");
        assert!((excl_p[v] - 0.2).abs() < 1e-12);
    }
    for (pair, &p) in &pair_p {
        let f = pair_count.get(pair).copied().unwrap_or(0.0) / t;
        let se = (p * (1.0 - p) / t).sqrt();
        assert!((f - p).abs() <= 3.0 * se, "pair {pair:?}: {f} vs {p}");
    }
}
