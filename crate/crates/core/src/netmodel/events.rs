use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Node identifier. Assigned in increasing order and never reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Unordered node pair, stored with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pair {
    pub lo: NodeId,
    pub hi: NodeId,
}

impl Pair {
    pub fn new(a: NodeId, b: NodeId) -> Self {
        debug_assert_ne!(a, b);
        if a < b {
            Self { lo: a, hi: b }
        } else {
            Self { lo: b, hi: a }
        }
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.lo == v || self.hi == v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SteadyEdge {
    pub pair: Pair,
    /// Iteration in which the partnership formed.
    pub start: u64,
}

/// A steady partnership that ended. `end` is the last iteration in which it
/// was still present, so its duration is `end - start + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SteadyDissolution {
    pub pair: Pair,
    pub start: u64,
    pub end: u64,
}

impl SteadyDissolution {
    pub fn duration(&self) -> u64 {
        self.end - self.start + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CasualFormation {
    pub pair: Pair,
    /// Whether `pair.lo` held a steady partner when the contact formed.
    pub lo_partnered: bool,
    pub hi_partnered: bool,
}

/// Everything that happened during one iteration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: u64,
    pub departures: Vec<NodeId>,
    pub arrivals: Vec<NodeId>,
    pub steady_dissolved: Vec<SteadyDissolution>,
    /// Partnerships formed this iteration; their start stamp is `iteration`.
    pub steady_formed: Vec<Pair>,
    pub casual_formed: Vec<CasualFormation>,
}

impl IterationRecord {
    pub fn new(iteration: u64) -> Self {
        Self {
            iteration,
            ..Default::default()
        }
    }
}

/// Network at the end of an iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub iteration: u64,
    /// Ascending.
    pub nodes: Vec<NodeId>,
    /// Sorted by pair.
    pub steady: Vec<SteadyEdge>,
    /// Sorted.
    pub casual: Vec<Pair>,
}

impl Snapshot {
    /// Applies one iteration's events, producing the following snapshot.
    pub fn apply(&self, rec: &IterationRecord) -> Snapshot {
        let gone: BTreeSet<NodeId> = rec.departures.iter().copied().collect();
        let ended: BTreeSet<Pair> = rec.steady_dissolved.iter().map(|d| d.pair).collect();

        let mut nodes: BTreeSet<NodeId> =
            self.nodes.iter().copied().filter(|v| !gone.contains(v)).collect();
        nodes.extend(rec.arrivals.iter().copied());

        let mut steady: BTreeMap<Pair, u64> = self
            .steady
            .iter()
            .filter(|e| !ended.contains(&e.pair))
            .map(|e| (e.pair, e.start))
            .collect();
        for &p in &rec.steady_formed {
            steady.insert(p, rec.iteration);
        }

        let mut casual: Vec<Pair> = rec.casual_formed.iter().map(|c| c.pair).collect();
        casual.sort_unstable();

        Snapshot {
            iteration: rec.iteration,
            nodes: nodes.into_iter().collect(),
            steady: steady
                .into_iter()
                .map(|(pair, start)| SteadyEdge { pair, start })
                .collect(),
            casual,
        }
    }
}

/// Recorded history: the network at the start of the recorded span plus one
/// record per recorded iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    pub initial: Snapshot,
    pub records: Vec<IterationRecord>,
}

impl EventLog {
    /// First iteration with a record.
    pub fn first_iteration(&self) -> u64 {
        self.initial.iteration + 1
    }

    /// Last iteration with a record.
    pub fn last_iteration(&self) -> u64 {
        self.initial.iteration + self.records.len() as u64
    }

    pub fn record(&self, iteration: u64) -> Option<&IterationRecord> {
        let offset = iteration.checked_sub(self.first_iteration())?;
        self.records.get(offset as usize)
    }

    pub fn span_contains(&self, from: u64, to: u64) -> bool {
        !self.records.is_empty()
            && from <= to
            && from >= self.first_iteration()
            && to <= self.last_iteration()
    }

    /// Snapshots after each recorded iteration, rebuilt from the events.
    pub fn replay(&self) -> impl Iterator<Item = Snapshot> + '_ {
        let mut current = self.initial.clone();
        self.records.iter().map(move |rec| {
            current = current.apply(rec);
            current.clone()
        })
    }
}
