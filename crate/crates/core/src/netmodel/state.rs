use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    match_pairs, CasualFormation, EventLog, IterationRecord, NodeId, Pair, ParamSet, Snapshot,
    SteadyDissolution, SteadyEdge,
};
use crate::error::{Error, Result};
use crate::rng::{Domain, StreamKey};

/// Receives events as a step produces them. Burn-in uses `()`.
trait EventSink {
    fn departure(&mut self, _v: NodeId) {}
    fn arrival(&mut self, _v: NodeId) {}
    fn steady_dissolved(&mut self, _d: SteadyDissolution) {}
    fn steady_formed(&mut self, _p: Pair) {}
    fn casual_formed(&mut self, _c: CasualFormation) {}
}

impl EventSink for () {}

impl EventSink for IterationRecord {
    fn departure(&mut self, v: NodeId) {
        self.departures.push(v);
    }
    fn arrival(&mut self, v: NodeId) {
        self.arrivals.push(v);
    }
    fn steady_dissolved(&mut self, d: SteadyDissolution) {
        self.steady_dissolved.push(d);
    }
    fn steady_formed(&mut self, p: Pair) {
        self.steady_formed.push(p);
    }
    fn casual_formed(&mut self, c: CasualFormation) {
        self.casual_formed.push(c);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Steady {
    partner: NodeId,
    start: u64,
}

/// Live network. Per-node data is indexed by node id; ids are dense because
/// they are handed out sequentially.
#[derive(Debug, Clone)]
pub struct NetworkState {
    iteration: u64,
    /// Present nodes, ascending.
    nodes: Vec<NodeId>,
    present: Vec<bool>,
    steady: Vec<Option<Steady>>,
    casual: Vec<Option<NodeId>>,
    casual_edges: Vec<Pair>,
    arrival_accumulator: f64,
    // scratch buffers reused across steps
    willing: Vec<NodeId>,
    departed: Vec<NodeId>,
}

#[inline]
fn bernoulli<R: Rng + ?Sized>(rng: &mut R, p: f64) -> bool {
    if p <= 0.0 {
        false
    } else if p >= 1.0 {
        true
    } else {
        rng.random::<f64>() < p
    }
}

impl NetworkState {
    /// `n` single nodes with ids `0..n`, no edges, iteration 0.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::PopulationTooSmall(n));
        }
        Ok(Self {
            iteration: 0,
            nodes: (0..n as u32).map(NodeId).collect(),
            present: vec![true; n],
            steady: vec![None; n],
            casual: vec![None; n],
            casual_edges: Vec::new(),
            arrival_accumulator: 0.0,
            willing: Vec::new(),
            departed: Vec::new(),
        })
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn arrival_accumulator(&self) -> f64 {
        self.arrival_accumulator
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.present.get(v.index()).copied().unwrap_or(false)
    }

    pub fn steady_partner(&self, v: NodeId) -> Option<NodeId> {
        self.steady.get(v.index()).copied().flatten().map(|s| s.partner)
    }

    pub fn casual_partner(&self, v: NodeId) -> Option<NodeId> {
        self.casual.get(v.index()).copied().flatten()
    }

    /// Steady edges in ascending pair order.
    pub fn steady_edges(&self) -> impl Iterator<Item = SteadyEdge> + '_ {
        self.nodes.iter().filter_map(move |&v| {
            let s = self.steady[v.index()]?;
            (s.partner > v).then(|| SteadyEdge {
                pair: Pair::new(v, s.partner),
                start: s.start,
            })
        })
    }

    pub fn casual_edges(&self) -> &[Pair] {
        &self.casual_edges
    }

    pub fn snapshot(&self) -> Snapshot {
        let mut casual = self.casual_edges.clone();
        casual.sort_unstable();
        Snapshot {
            iteration: self.iteration,
            nodes: self.nodes.clone(),
            steady: self.steady_edges().collect(),
            casual,
        }
    }

    /// Advances one iteration and returns its events.
    pub fn step<R: Rng + ?Sized>(&mut self, params: &ParamSet, rng: &mut R) -> IterationRecord {
        let mut rec = IterationRecord::new(self.iteration + 1);
        self.advance(params, rng, &mut rec);
        rec
    }

    /// Advances one iteration without recording events.
    pub fn step_quiet<R: Rng + ?Sized>(&mut self, params: &ParamSet, rng: &mut R) {
        self.advance(params, rng, &mut ());
    }

    fn advance<R: Rng + ?Sized, S: EventSink>(&mut self, params: &ParamSet, rng: &mut R, sink: &mut S) {
        let it = self.iteration + 1;

        for p in self.casual_edges.drain(..) {
            self.casual[p.lo.index()] = None;
            self.casual[p.hi.index()] = None;
        }

        self.migrate(params, it, rng, sink);

        // steady dissolution, visiting each edge once from its lower endpoint
        for i in 0..self.nodes.len() {
            let v = self.nodes[i];
            let Some(s) = self.steady[v.index()] else { continue };
            if s.partner < v || !bernoulli(rng, params.sigma) {
                continue;
            }
            self.steady[v.index()] = None;
            self.steady[s.partner.index()] = None;
            sink.steady_dissolved(SteadyDissolution {
                pair: Pair::new(v, s.partner),
                start: s.start,
                end: it - 1,
            });
        }

        // steady formation among singles
        self.willing.clear();
        for &v in &self.nodes {
            if self.steady[v.index()].is_none() && bernoulli(rng, params.rho) {
                self.willing.push(v);
            }
        }
        for p in match_pairs(&self.willing, rng) {
            self.steady[p.lo.index()] = Some(Steady { partner: p.hi, start: it });
            self.steady[p.hi.index()] = Some(Steady { partner: p.lo, start: it });
            sink.steady_formed(p);
        }

        // casual formation over singles and partnered nodes together
        self.willing.clear();
        for &v in &self.nodes {
            let p = if self.steady[v.index()].is_none() {
                params.omega0
            } else {
                params.omega1
            };
            if bernoulli(rng, p) {
                self.willing.push(v);
            }
        }
        for p in match_pairs(&self.willing, rng) {
            self.casual[p.lo.index()] = Some(p.hi);
            self.casual[p.hi.index()] = Some(p.lo);
            self.casual_edges.push(p);
            sink.casual_formed(CasualFormation {
                pair: p,
                lo_partnered: self.steady[p.lo.index()].is_some(),
                hi_partnered: self.steady[p.hi.index()].is_some(),
            });
        }

        self.iteration = it;
    }

    fn migrate<R: Rng + ?Sized, S: EventSink>(&mut self, params: &ParamSet, it: u64, rng: &mut R, sink: &mut S) {
        if params.mu <= 0.0 {
            return;
        }
        self.departed.clear();
        for &v in &self.nodes {
            if bernoulli(rng, params.mu) {
                self.departed.push(v);
            }
        }
        for i in 0..self.departed.len() {
            let v = self.departed[i];
            if let Some(s) = self.steady[v.index()].take() {
                self.steady[s.partner.index()] = None;
                sink.steady_dissolved(SteadyDissolution {
                    pair: Pair::new(v, s.partner),
                    start: s.start,
                    end: it - 1,
                });
            }
            self.present[v.index()] = false;
            sink.departure(v);
        }
        if !self.departed.is_empty() {
            let present = &self.present;
            self.nodes.retain(|v| present[v.index()]);
        }

        self.arrival_accumulator += params.n as f64 * params.mu;
        let arrivals = self.arrival_accumulator.floor();
        self.arrival_accumulator -= arrivals;
        for _ in 0..arrivals as usize {
            let v = NodeId(self.present.len() as u32);
            self.present.push(true);
            self.steady.push(None);
            self.casual.push(None);
            self.nodes.push(v);
            sink.arrival(v);
        }
    }
}

/// Outcome of [`simulate`].
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub log: EventLog,
    pub final_state: NetworkState,
}

/// Runs `burn_in` unrecorded iterations from the empty graph, then
/// `record_span` recorded ones. Steady start stamps survive burn-in.
pub fn simulate<R: Rng + ?Sized>(
    params: &ParamSet,
    burn_in: u64,
    record_span: u64,
    rng: &mut R,
) -> Result<Trajectory> {
    params.validate()?;
    if record_span < 1 {
        return Err(Error::InvalidParam("record span must be at least 1".into()));
    }
    let mut state = NetworkState::new(params.n)?;
    for _ in 0..burn_in {
        state.step_quiet(params, rng);
    }
    let initial = state.snapshot();
    let records = (0..record_span).map(|_| state.step(params, rng)).collect();
    Ok(Trajectory {
        log: EventLog { initial, records },
        final_state: state,
    })
}

/// [`simulate`] on the trajectory stream of `seed`.
pub fn simulate_seeded(params: &ParamSet, burn_in: u64, record_span: u64, seed: u64) -> Result<Trajectory> {
    let mut rng = StreamKey::new(seed, Domain::Trajectory, 0).rng();
    simulate(params, burn_in, record_span, &mut rng)
}
