//! Questionnaire-style summaries of a recorded trajectory.
//!
//! A wave ending at iteration `t` with recall window `w` sees the iterations
//! `t - w + 1 ..= t`:
//!
//! * `s1`: fraction of present nodes without a steady partner at `t`;
//! * `s2`: mean duration of steady partnerships that both formed and were
//!   observed to dissolve inside the window;
//! * `s3`: among steady-partnered nodes at `t`, the fraction that also have a
//!   casual contact at `t`;
//! * `s4`: steady partnerships overlapping the window divided by all
//!   partnerships (steady overlapping plus casual formed) in the window.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::{EventLog, NodeId, Pair};

pub const DEFAULT_WINDOW: u64 = 12;

/// Observation design of a study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Design {
    OneWave,
    TwoWave { lag: u64 },
}

impl Design {
    pub fn waves(&self) -> usize {
        match self {
            Design::OneWave => 1,
            Design::TwoWave { .. } => 2,
        }
    }

    /// Length of the design vector.
    pub fn dim(&self) -> usize {
        4 * self.waves()
    }

    pub fn lag(&self) -> Option<u64> {
        match *self {
            Design::OneWave => None,
            Design::TwoWave { lag } => Some(lag),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Design::OneWave => "one-wave",
            Design::TwoWave { .. } => "two-wave",
        }
    }

    /// Recorded iterations needed after burn-in.
    pub fn required_span(&self, window: u64) -> u64 {
        window + self.lag().unwrap_or(0)
    }

    pub fn column_names(&self) -> Vec<String> {
        (1..=self.waves())
            .flat_map(|w| (1..=4).map(move |s| format!("w{w}_s{s}")))
            .collect()
    }

    pub fn from_parts(tag: &str, lag: Option<u64>) -> Result<Self> {
        match (tag, lag) {
            ("one-wave", _) => Ok(Design::OneWave),
            ("two-wave", Some(lag)) => Ok(Design::TwoWave { lag }),
            ("two-wave", None) => Err(Error::Format("two-wave design needs a lag".into())),
            (other, _) => Err(Error::Format(format!("unknown design '{other}'"))),
        }
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Design::OneWave => f.write_str("one-wave"),
            Design::TwoWave { lag } => write!(f, "two-wave:{lag}"),
        }
    }
}

impl FromStr for Design {
    type Err = Error;

    /// Accepts `one-wave`, `two-wave:<lag>`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None => Design::from_parts(s, None),
            Some((tag, lag)) => {
                let lag = lag
                    .parse()
                    .map_err(|_| Error::Format(format!("bad lag in design '{s}'")))?;
                Design::from_parts(tag, Some(lag))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryVector {
    pub s1: f64,
    /// Zero when `s2_defined` is false.
    pub s2: f64,
    pub s2_defined: bool,
    pub s3: f64,
    pub s4: f64,
}

impl SummaryVector {
    pub fn values(&self) -> [f64; 4] {
        [self.s1, self.s2, self.s3, self.s4]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignVector {
    pub design: Design,
    pub waves: Vec<SummaryVector>,
}

impl DesignVector {
    /// Wave-1 components followed by wave-2 components.
    pub fn values(&self) -> Vec<f64> {
        self.waves.iter().flat_map(|w| w.values()).collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct SteadySpell {
    start: u64,
    /// Last iteration present; `None` while still open at the end of the log.
    end: Option<u64>,
}

/// Per-partnership and per-node lifetimes extracted from an [`EventLog`],
/// so that many waves can be summarized without replaying.
pub struct LogIndex<'a> {
    log: &'a EventLog,
    steady: Vec<SteadySpell>,
    /// `(arrived, departed)`: present at iterations `arrived..departed`.
    node_spans: Vec<(u64, Option<u64>)>,
}

impl<'a> LogIndex<'a> {
    pub fn new(log: &'a EventLog) -> Self {
        let mut steady = Vec::new();
        let mut open: HashMap<Pair, usize> = HashMap::new();
        for e in &log.initial.steady {
            open.insert(e.pair, steady.len());
            steady.push(SteadySpell { start: e.start, end: None });
        }
        let mut node_spans = Vec::new();
        let mut node_pos: HashMap<NodeId, usize> = HashMap::new();
        for &v in &log.initial.nodes {
            node_pos.insert(v, node_spans.len());
            node_spans.push((log.initial.iteration, None));
        }
        for rec in &log.records {
            for d in &rec.steady_dissolved {
                match open.remove(&d.pair) {
                    Some(i) => steady[i].end = Some(d.end),
                    None => steady.push(SteadySpell { start: d.start, end: Some(d.end) }),
                }
            }
            for &v in &rec.departures {
                if let Some(&i) = node_pos.get(&v) {
                    node_spans[i].1 = Some(rec.iteration);
                }
            }
            for &v in &rec.arrivals {
                node_pos.insert(v, node_spans.len());
                node_spans.push((rec.iteration, None));
            }
            for &p in &rec.steady_formed {
                open.insert(p, steady.len());
                steady.push(SteadySpell { start: rec.iteration, end: None });
            }
        }
        Self { log, steady, node_spans }
    }

    pub fn log(&self) -> &EventLog {
        self.log
    }

    pub fn wave_summaries(&self, wave_end: u64, window: u64) -> Result<SummaryVector> {
        if window < 1 {
            return Err(Error::InvalidParam("window must be at least 1".into()));
        }
        let from = (wave_end + 1).saturating_sub(window);
        if wave_end < window || !self.log.span_contains(from, wave_end) {
            return Err(Error::OutsideRecordedSpan {
                from,
                to: wave_end,
                first: self.log.first_iteration(),
                last: self.log.last_iteration(),
            });
        }

        let present_nodes = self
            .node_spans
            .iter()
            .filter(|(a, d)| *a <= wave_end && d.is_none_or(|d| d > wave_end))
            .count();

        let mut steady_now = 0usize;
        let mut overlapping = 0usize;
        let mut completed = 0usize;
        let mut completed_len = 0u64;
        for s in &self.steady {
            let last = s.end.unwrap_or(u64::MAX);
            if s.start <= wave_end && last >= wave_end {
                steady_now += 1;
            }
            if s.start <= wave_end && last >= from {
                overlapping += 1;
            }
            // dissolution happens in iteration end + 1, which must be observed
            if let Some(end) = s.end {
                if s.start >= from && end < wave_end {
                    completed += 1;
                    completed_len += end - s.start + 1;
                }
            }
        }

        let casual_now = self.log.record(wave_end).map_or(0, |r| {
            r.casual_formed
                .iter()
                .map(|c| c.lo_partnered as usize + c.hi_partnered as usize)
                .sum::<usize>()
        });
        let casual_in_window: usize = (from..=wave_end)
            .filter_map(|t| self.log.record(t))
            .map(|r| r.casual_formed.len())
            .sum();

        let partnered = 2 * steady_now;
        let s1 = if present_nodes == 0 {
            0.0
        } else {
            1.0 - partnered as f64 / present_nodes as f64
        };
        let (s2, s2_defined) = if completed == 0 {
            (0.0, false)
        } else {
            (completed_len as f64 / completed as f64, true)
        };
        let s3 = if partnered == 0 {
            0.0
        } else {
            casual_now as f64 / partnered as f64
        };
        let episodes = overlapping + casual_in_window;
        let s4 = if episodes == 0 {
            0.0
        } else {
            overlapping as f64 / episodes as f64
        };
        Ok(SummaryVector { s1, s2, s2_defined, s3, s4 })
    }

    pub fn design_summaries(&self, design: Design, window: u64) -> Result<DesignVector> {
        let needed = design.required_span(window);
        let have = self.log.records.len() as u64;
        if have < needed {
            return Err(Error::InvalidParam(format!(
                "design {design} with window {window} needs {needed} recorded iterations, log has {have}"
            )));
        }
        let first_end = self.log.initial.iteration + window;
        let mut waves = vec![self.wave_summaries(first_end, window)?];
        if let Design::TwoWave { lag } = design {
            waves.push(self.wave_summaries(first_end + lag, window)?);
        }
        Ok(DesignVector { design, waves })
    }
}

/// Summaries of the wave ending at `wave_end`.
pub fn wave_summaries(log: &EventLog, wave_end: u64, window: u64) -> Result<SummaryVector> {
    LogIndex::new(log).wave_summaries(wave_end, window)
}

/// Design vector with the first wave ending `window` iterations after the
/// start of the recorded span.
pub fn design_summaries(log: &EventLog, design: Design, window: u64) -> Result<DesignVector> {
    LogIndex::new(log).design_summaries(design, window)
}

/// Headered `design,lag,wave,s1,s2,s2_defined,s3,s4` CSV.
pub fn write_summaries_csv<W: Write>(vectors: &[DesignVector], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["design", "lag", "wave", "s1", "s2", "s2_defined", "s3", "s4"])?;
    for dv in vectors {
        let lag = dv.design.lag().map(|l| l.to_string()).unwrap_or_default();
        for (i, s) in dv.waves.iter().enumerate() {
            w.write_record([
                dv.design.tag().to_string(),
                lag.clone(),
                (i + 1).to_string(),
                s.s1.to_string(),
                s.s2.to_string(),
                s.s2_defined.to_string(),
                s.s3.to_string(),
                s.s4.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{
        simulate_seeded, CasualFormation, IterationRecord, ParamSet, Snapshot, SteadyDissolution,
        SteadyEdge,
    };

    fn pair(a: u32, b: u32) -> Pair {
        Pair::new(NodeId(a), NodeId(b))
    }

    fn quiet_log(n: u32, steady: Vec<SteadyEdge>, span: u64) -> EventLog {
        EventLog {
            initial: Snapshot {
                iteration: 0,
                nodes: (0..n).map(NodeId).collect(),
                steady,
                casual: vec![],
            },
            records: (1..=span).map(IterationRecord::new).collect(),
        }
    }

    #[test]
    fn direct_counting() {
        let log = quiet_log(
            10,
            vec![
                SteadyEdge { pair: pair(0, 1), start: 0 },
                SteadyEdge { pair: pair(2, 3), start: 0 },
            ],
            12,
        );
        let s = wave_summaries(&log, 12, 12).unwrap();
        assert!((s.s1 - 0.6).abs() < 1e-15);
        assert_eq!(s.s3, 0.0);
        assert_eq!(s.s4, 1.0);
        assert!(!s.s2_defined);
        assert_eq!(s.s2, 0.0);
    }

    #[test]
    fn completed_duration() {
        let mut log = quiet_log(4, vec![], 12);
        log.records[2].steady_formed.push(pair(0, 1));
        // present at 3, 4, 5, 6; gone from iteration 7
        log.records[6].steady_dissolved.push(SteadyDissolution {
            pair: pair(0, 1),
            start: 3,
            end: 6,
        });
        let s = wave_summaries(&log, 12, 12).unwrap();
        assert!(s.s2_defined);
        assert_eq!(s.s2, 4.0);
        assert_eq!(s.s1, 1.0);
        assert_eq!(s.s4, 1.0);
    }

    #[test]
    fn casual_counts() {
        let mut log = quiet_log(6, vec![SteadyEdge { pair: pair(0, 1), start: 0 }], 3);
        log.records[0].casual_formed.push(CasualFormation {
            pair: pair(2, 3),
            lo_partnered: false,
            hi_partnered: false,
        });
        log.records[2].casual_formed.push(CasualFormation {
            pair: pair(0, 4),
            lo_partnered: true,
            hi_partnered: false,
        });
        let s = wave_summaries(&log, 3, 3).unwrap();
        assert_eq!(s.s3, 0.5);
        assert!((s.s4 - 1.0 / 3.0).abs() < 1e-15);
        // window of one iteration sees only the last casual contact
        let s = wave_summaries(&log, 3, 1).unwrap();
        assert_eq!(s.s4, 0.5);
    }

    #[test]
    fn window_outside_span() {
        let log = quiet_log(4, vec![], 12);
        assert!(wave_summaries(&log, 13, 12).is_err());
        assert!(wave_summaries(&log, 11, 12).is_err());
        assert!(wave_summaries(&log, 12, 0).is_err());
        assert!(design_summaries(&log, Design::TwoWave { lag: 1 }, 12).is_err());
    }

    #[test]
    fn design_shapes_and_lag_zero() {
        let t = simulate_seeded(&ParamSet::REFERENCE.with_n(300), 200, 40, 5).unwrap();
        let one = design_summaries(&t.log, Design::OneWave, 12).unwrap();
        assert_eq!(one.values().len(), 4);
        let two = design_summaries(&t.log, Design::TwoWave { lag: 0 }, 12).unwrap();
        assert_eq!(two.values().len(), 8);
        assert_eq!(two.waves[0], two.waves[1]);
        assert_eq!(one.waves[0], two.waves[0]);
        let lagged = design_summaries(&t.log, Design::TwoWave { lag: 28 }, 12).unwrap();
        assert_eq!(lagged.waves[0], one.waves[0]);
        assert!(design_summaries(&t.log, Design::TwoWave { lag: 29 }, 12).is_err());
    }

    #[test]
    fn design_parse_roundtrip() {
        for d in [Design::OneWave, Design::TwoWave { lag: 0 }, Design::TwoWave { lag: 150 }] {
            assert_eq!(d.to_string().parse::<Design>().unwrap(), d);
        }
        assert!("two-wave".parse::<Design>().is_err());
        assert!("three-wave:4".parse::<Design>().is_err());
        assert_eq!(Design::TwoWave { lag: 3 }.column_names()[7], "w2_s4");
    }

    #[test]
    fn summaries_csv() {
        let log = quiet_log(4, vec![SteadyEdge { pair: pair(0, 1), start: 0 }], 12);
        let dv = design_summaries(&log, Design::OneWave, 12).unwrap();
        let mut buf = Vec::new();
        write_summaries_csv(&[dv], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "design,lag,wave,s1,s2,s2_defined,s3,s4\none-wave,,1,0.5,0,false,0,1\n"
        );
    }
}
