use std::fmt;
use std::io::Write;

use serde::Serialize;

use super::{EventLog, NodeId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Steady,
    Casual,
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeKind::Steady => "steady",
            EdgeKind::Casual => "casual",
        })
    }
}

/// One edge present at the end of `iteration`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct EdgeRow {
    pub iteration: u64,
    #[serde(rename = "type")]
    pub kind: EdgeKind,
    pub node_u: NodeId,
    pub node_v: NodeId,
}

/// Edges present at the end of each iteration in `[from, to]`, sorted by
/// `(iteration, type, node_u, node_v)` with `node_u < node_v`.
pub fn export_edges(log: &EventLog, from: u64, to: u64) -> Result<Vec<EdgeRow>> {
    if !log.span_contains(from, to) {
        return Err(Error::OutsideRecordedSpan {
            from,
            to,
            first: log.first_iteration(),
            last: log.last_iteration(),
        });
    }
    let mut rows = Vec::new();
    for snap in log.replay() {
        if snap.iteration < from {
            continue;
        }
        if snap.iteration > to {
            break;
        }
        let steady = snap.steady.iter().map(|e| (EdgeKind::Steady, e.pair));
        let casual = snap.casual.iter().map(|&p| (EdgeKind::Casual, p));
        rows.extend(steady.chain(casual).map(|(kind, p)| EdgeRow {
            iteration: snap.iteration,
            kind,
            node_u: p.lo,
            node_v: p.hi,
        }));
    }
    rows.sort_unstable();
    Ok(rows)
}

/// Headered `iteration,node_u,node_v,type` CSV with LF line endings.
pub fn write_edges_csv<W: Write>(rows: &[EdgeRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["iteration", "node_u", "node_v", "type"])?;
    for r in rows {
        w.write_record([
            r.iteration.to_string(),
            r.node_u.to_string(),
            r.node_v.to_string(),
            r.kind.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{IterationRecord, Pair, Snapshot};

    fn log_with_one_steady() -> EventLog {
        let initial = Snapshot {
            iteration: 4,
            nodes: (0..10).map(NodeId).collect(),
            steady: vec![],
            casual: vec![],
        };
        let mut r5 = IterationRecord::new(5);
        r5.steady_formed.push(Pair::new(NodeId(7), NodeId(3)));
        EventLog {
            initial,
            records: vec![r5, IterationRecord::new(6)],
        }
    }

    #[test]
    fn single_steady_edge_row() {
        let log = log_with_one_steady();
        let rows = export_edges(&log, 5, 5).unwrap();
        assert_eq!(rows.len(), 1);
        let mut buf = Vec::new();
        write_edges_csv(&rows, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "iteration,node_u,node_v,type\n5,3,7,steady\n"
        );
    }

    #[test]
    fn range_without_edges_is_empty() {
        let mut log = log_with_one_steady();
        log.records[0].steady_formed.clear();
        assert!(export_edges(&log, 5, 6).unwrap().is_empty());
    }

    #[test]
    fn range_outside_span_errors() {
        let log = log_with_one_steady();
        assert!(export_edges(&log, 4, 5).is_err());
        assert!(export_edges(&log, 5, 7).is_err());
        assert!(export_edges(&log, 6, 5).is_err());
    }
}
