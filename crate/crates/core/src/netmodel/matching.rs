use rand::seq::SliceRandom;
use rand::Rng;

use super::{NodeId, Pair};

/// Pairs as many willing nodes as possible, uniformly at random.
///
/// The pool is shuffled and consecutive entries are paired; with an odd pool
/// the last shuffled node is left out, so every node is equally likely to
/// be the one excluded.
pub fn match_pairs<R: Rng + ?Sized>(willing: &[NodeId], rng: &mut R) -> Vec<Pair> {
    if willing.len() < 2 {
        return Vec::new();
    }
    let mut pool = willing.to_vec();
    pool.shuffle(rng);
    pool.chunks_exact(2)
        .map(|c| Pair::new(c[0], c[1]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Domain, StreamKey};

    fn ids(v: &[u32]) -> Vec<NodeId> {
        v.iter().copied().map(NodeId).collect()
    }

    #[test]
    fn empty_and_single() {
        let mut rng = StreamKey::new(0, Domain::Trajectory, 0).rng();
        assert!(match_pairs(&[], &mut rng).is_empty());
        assert!(match_pairs(&ids(&[4]), &mut rng).is_empty());
    }

    #[test]
    fn two_nodes_forced() {
        let mut rng = StreamKey::new(0, Domain::Trajectory, 0).rng();
        let p = match_pairs(&ids(&[9, 2]), &mut rng);
        assert_eq!(p, vec![Pair::new(NodeId(2), NodeId(9))]);
    }

    #[test]
    fn pairs_are_disjoint_and_maximal() {
        let mut rng = StreamKey::new(3, Domain::Trajectory, 0).rng();
        for len in 0..40u32 {
            let pool: Vec<NodeId> = (0..len).map(|i| NodeId(i * 3)).collect();
            let pairs = match_pairs(&pool, &mut rng);
            assert_eq!(pairs.len(), pool.len() / 2);
            let mut seen = std::collections::HashSet::new();
            for p in &pairs {
                assert!(p.lo < p.hi);
                assert!(seen.insert(p.lo) && seen.insert(p.hi));
                assert!(pool.contains(&p.lo) && pool.contains(&p.hi));
            }
        }
    }
}
