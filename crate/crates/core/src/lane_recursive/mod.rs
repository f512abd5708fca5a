//! Lanewidth operation sequences, k-lane graphs and hierarchical decompositions.
//!
//! A sequence starts from a path `τ_1 … τ_k` of designated vertices. `V i v`
//! attaches a fresh vertex `v` to `τ_i` and makes it the new `τ_i`; `E i j`
//! joins `τ_i` and `τ_j`. Lanes are 1-based throughout this module.

mod decomposition;
mod klane;

pub use decomposition::{build_hierarchical_decomposition, DecompNode, HierarchicalDecomposition, NodeId, NodeKind};
pub use klane::{bridge_merge, parent_merge, tree_merge, tree_merge_in_order, KLaneGraph, MergeTree};

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexId};
use crate::interval::{IntervalError, IntervalRepresentation};
use crate::lane_partition::{LanePartition, PartitionError};

pub type Lane = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaneError {
    #[error("lane count must be at least 1")]
    NoLanes,
    #[error("lane {lane} outside 1..={k}")]
    LaneOutOfRange { lane: Lane, k: usize },
    #[error("edge insert joins lane {0} to itself")]
    SameLane(Lane),
    #[error("vertex {0} is not fresh")]
    StaleVertex(VertexId),
    #[error("vertex ids do not cover 0..{0}")]
    IdGap(usize),
    #[error("edge insert duplicates edge {{{0}, {1}}}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("lane sets overlap")]
    LaneOverlap,
    #[error("lane {0} is missing from the fragment")]
    MissingLane(Lane),
    #[error("child lanes are not contained in parent lanes")]
    NotContained,
    #[error("in-terminal of lane {0} does not meet the parent's out-terminal")]
    TerminalMismatch(Lane),
    #[error("merge would identify edge {{{0}, {1}}}")]
    EdgeIdentified(VertexId, VertexId),
    #[error("fragments share vertex {0} outside the identified terminals")]
    VertexClash(VertexId),
    #[error("merge tree is malformed")]
    BadTree,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    VInsert { lane: Lane, vertex: VertexId },
    EInsert { a: Lane, b: Lane },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpSequence {
    pub k: usize,
    pub initial: Vec<VertexId>,
    pub ops: Vec<Op>,
}

/// Graph built by a sequence, with the final designated vertices per lane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Applied {
    pub graph: Graph,
    pub designated: Vec<VertexId>,
}

impl OpSequence {
    /// Initial path `0, 1, …, k-1`.
    pub fn new(k: usize, ops: Vec<Op>) -> Self {
        Self { k, initial: (0..k).collect(), ops }
    }

    pub fn vertex_count(&self) -> usize {
        self.k + self.ops.iter().filter(|o| matches!(o, Op::VInsert { .. })).count()
    }

    fn check_lane(&self, lane: Lane) -> Result<usize, LaneError> {
        if lane == 0 || lane > self.k {
            return Err(LaneError::LaneOutOfRange { lane, k: self.k });
        }
        Ok(lane - 1)
    }

    /// Replays the sequence, calling `on_edge(step, u, v)` for each edge as it appears.
    fn replay(&self, mut on_edge: impl FnMut(usize, VertexId, VertexId)) -> Result<Vec<VertexId>, LaneError> {
        if self.k == 0 {
            return Err(LaneError::NoLanes);
        }
        if self.initial.len() != self.k {
            return Err(LaneError::LaneOutOfRange { lane: self.initial.len(), k: self.k });
        }
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut fresh = |v: VertexId| -> Result<(), LaneError> {
            if v >= n {
                return Err(LaneError::IdGap(n));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(LaneError::StaleVertex(v));
            }
            Ok(())
        };
        let mut edges: HashSet<(VertexId, VertexId)> = HashSet::new();
        let mut add = |step: usize, u: VertexId, v: VertexId| -> Result<(), LaneError> {
            if !edges.insert((u.min(v), u.max(v))) {
                return Err(LaneError::DuplicateEdge(u.min(v), u.max(v)));
            }
            on_edge(step, u, v);
            Ok(())
        };
        for &v in &self.initial {
            fresh(v)?;
        }
        for w in self.initial.windows(2) {
            add(0, w[0], w[1])?;
        }
        let mut tau = self.initial.clone();
        for (x, op) in self.ops.iter().enumerate() {
            match *op {
                Op::VInsert { lane, vertex } => {
                    let i = self.check_lane(lane)?;
                    fresh(vertex)?;
                    add(x + 1, tau[i], vertex)?;
                    tau[i] = vertex;
                }
                Op::EInsert { a, b } => {
                    let (i, j) = (self.check_lane(a)?, self.check_lane(b)?);
                    if i == j {
                        return Err(LaneError::SameLane(a));
                    }
                    add(x + 1, tau[i], tau[j])?;
                }
            }
        }
        Ok(tau)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.k);
        if self.initial != (0..self.k).collect::<Vec<_>>() {
            let ids: Vec<String> = self.initial.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "P {}", ids.join(" "));
        }
        for op in &self.ops {
            let _ = match op {
                Op::VInsert { lane, vertex } => writeln!(s, "V {lane} {vertex}"),
                Op::EInsert { a, b } => writeln!(s, "E {a} {b}"),
            };
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, LaneError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let bad = |line: usize, msg: &str| LaneError::Parse { line, msg: msg.to_string() };
        let (hl, head) = lines.next().ok_or_else(|| bad(1, "missing header"))?;
        let k: usize = head.parse().map_err(|_| bad(hl, "header must be `k`"))?;
        let mut seq = OpSequence::new(k, Vec::new());
        for (ln, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            let nums = |xs: &[&str]| -> Result<Vec<usize>, LaneError> {
                xs.iter().map(|x| x.parse::<usize>().map_err(|_| bad(ln, "bad number"))).collect()
            };
            match (f[0], f.len()) {
                ("P", _) if seq.ops.is_empty() => seq.initial = nums(&f[1..])?,
                ("V", 3) => {
                    let x = nums(&f[1..])?;
                    seq.ops.push(Op::VInsert { lane: x[0], vertex: x[1] });
                }
                ("E", 3) => {
                    let x = nums(&f[1..])?;
                    seq.ops.push(Op::EInsert { a: x[0], b: x[1] });
                }
                _ => return Err(bad(ln, "expected `V i v` or `E i j`")),
            }
        }
        Ok(seq)
    }
}

pub fn apply_op_sequence(s: &OpSequence) -> Result<Applied, LaneError> {
    let mut edges = Vec::new();
    let designated = s.replay(|_, u, v| edges.push((u, v)))?;
    Ok(Applied { graph: Graph::new(s.vertex_count(), edges)?, designated })
}

/// Designation time spans as intervals, the edge-insert subgraph, and the lanes
/// traced by each designated slot.
pub fn op_sequence_to_completion(s: &OpSequence) -> Result<(Graph, IntervalRepresentation, LanePartition), LaneError> {
    s.replay(|_, _, _| ())?;
    let n = s.vertex_count();
    let end = s.ops.len() as i64;
    let mut lo = vec![0i64; n];
    let mut hi = vec![end; n];
    let mut lanes: Vec<Vec<VertexId>> = s.initial.iter().map(|&v| vec![v]).collect();
    let mut g_edges = Vec::new();
    for (x, op) in s.ops.iter().enumerate() {
        let step = x as i64 + 1;
        match *op {
            Op::VInsert { lane, vertex } => {
                let lane = &mut lanes[lane - 1];
                hi[*lane.last().expect("lanes start non-empty")] = step - 1;
                lo[vertex] = step;
                lane.push(vertex);
            }
            Op::EInsert { a, b } => {
                g_edges.push((*lanes[a - 1].last().expect("non-empty"), *lanes[b - 1].last().expect("non-empty")));
            }
        }
    }
    let ir = IntervalRepresentation::from_pairs(lo.into_iter().zip(hi))?;
    let g = Graph::new(n, g_edges)?;
    let lp = LanePartition::new(lanes, n)?;
    Ok((g, ir, lp))
}

/// Intervals of [`op_sequence_to_completion`] with each right end pushed one step,
/// so lane successors overlap; valid for the applied graph with width at most `k + 1`.
pub fn applied_graph_intervals(s: &OpSequence) -> Result<IntervalRepresentation, LaneError> {
    let (_, ir, _) = op_sequence_to_completion(s)?;
    Ok(IntervalRepresentation::from_pairs(ir.intervals().iter().map(|iv| (iv.lo(), iv.hi() + 1)))?)
}

/// Lane heads form the initial path; vertices (by left end) and host edges (by the
/// later left end of their endpoints) are replayed in order, vertices first on ties.
pub fn completion_to_op_sequence(
    g: &Graph,
    ir: &IntervalRepresentation,
    lp: &LanePartition,
) -> Result<OpSequence, LaneError> {
    ir.validate(g)?;
    if lp.n() != g.n() {
        return Err(PartitionError::NotAPartition(lp.n().min(g.n())).into());
    }
    lp.check_ordered(ir)?;
    let heads = lp.heads();
    let head_pairs: HashSet<(VertexId, VertexId)> =
        heads.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))).collect();
    // (key, 0 = vertex / 1 = edge, tie-break, op)
    let mut events: Vec<(i64, u8, (usize, usize), Op)> = Vec::new();
    for (i, lane) in lp.lanes().iter().enumerate() {
        for &v in &lane[1..] {
            events.push((ir.get(v).lo(), 0, (i, 0), Op::VInsert { lane: i + 1, vertex: v }));
        }
    }
    for &(u, v) in g.edges() {
        if head_pairs.contains(&(u, v)) {
            continue;
        }
        let (a, b) = (lp.lane_of(u).0, lp.lane_of(v).0);
        let key = ir.get(u).lo().max(ir.get(v).lo());
        events.push((key, 1, (u, v), Op::EInsert { a: a + 1, b: b + 1 }));
    }
    events.sort_by_key(|&(key, kind, tie, _)| (key, kind, tie));
    Ok(OpSequence { k: lp.k(), initial: heads, ops: events.into_iter().map(|e| e.3).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lane_partition::completion;

    fn v(lane: Lane, vertex: VertexId) -> Op {
        Op::VInsert { lane, vertex }
    }

    fn e(a: Lane, b: Lane) -> Op {
        Op::EInsert { a, b }
    }

    #[test]
    fn apply_examples() {
        let a = apply_op_sequence(&OpSequence::new(2, vec![])).unwrap();
        assert_eq!(a.graph.edges(), &[(0, 1)]);
        assert_eq!(a.designated, vec![0, 1]);

        let a = apply_op_sequence(&OpSequence::new(2, vec![v(1, 2)])).unwrap();
        assert_eq!(a.graph.edges(), &[(0, 1), (0, 2)]);
        assert_eq!(a.designated, vec![2, 1]);

        let a = apply_op_sequence(&OpSequence::new(2, vec![v(1, 2), e(1, 2)])).unwrap();
        assert!(a.graph.has_edge(2, 1));
    }

    #[test]
    fn malformed_sequences_are_rejected() {
        assert_eq!(apply_op_sequence(&OpSequence::new(2, vec![e(1, 2)])), Err(LaneError::DuplicateEdge(0, 1)));
        assert_eq!(apply_op_sequence(&OpSequence::new(2, vec![e(1, 1)])), Err(LaneError::SameLane(1)));
        assert_eq!(apply_op_sequence(&OpSequence::new(2, vec![v(3, 2)])), Err(LaneError::LaneOutOfRange { lane: 3, k: 2 }));
        assert_eq!(apply_op_sequence(&OpSequence::new(2, vec![v(1, 1)])), Err(LaneError::StaleVertex(1)));
        assert_eq!(apply_op_sequence(&OpSequence::new(2, vec![v(1, 5)])), Err(LaneError::IdGap(3)));
        assert_eq!(apply_op_sequence(&OpSequence::new(0, vec![])), Err(LaneError::NoLanes));
    }

    #[test]
    fn completion_of_trivial_sequences() {
        let (g, ir, lp) = op_sequence_to_completion(&OpSequence::new(2, vec![])).unwrap();
        assert_eq!(g.m(), 0);
        assert_eq!(ir, IntervalRepresentation::from_pairs([(0, 0), (0, 0)]).unwrap());
        assert_eq!(completion(&g, &ir, &lp, false).unwrap().graph.edges(), &[(0, 1)]);

        let (_, ir, _) = op_sequence_to_completion(&OpSequence::new(2, vec![v(1, 2)])).unwrap();
        assert_eq!(ir, IntervalRepresentation::from_pairs([(0, 0), (0, 1), (1, 1)]).unwrap());
    }

    #[test]
    fn round_trip_reproduces_graph() {
        let s = OpSequence::new(3, vec![v(1, 3), e(1, 3), v(2, 4), e(2, 3), v(3, 5), e(1, 2), v(1, 6), e(1, 3)]);
        let applied = apply_op_sequence(&s).unwrap();
        let (g, ir, lp) = op_sequence_to_completion(&s).unwrap();
        assert_eq!(completion(&g, &ir, &lp, false).unwrap().graph, applied.graph);
        let back = completion_to_op_sequence(&g, &ir, &lp).unwrap();
        assert_eq!(apply_op_sequence(&back).unwrap().graph, applied.graph);
        let wide = applied_graph_intervals(&s).unwrap();
        wide.validate(&applied.graph).unwrap();
        assert!(wide.width() <= s.k + 1);
    }

    #[test]
    fn singleton_lanes_give_no_ops() {
        let g = Graph::new(3, []).unwrap();
        let ir = IntervalRepresentation::from_pairs([(0, 0), (0, 0), (0, 0)]).unwrap();
        let lp = LanePartition::new(vec![vec![0], vec![1], vec![2]], 3).unwrap();
        let s = completion_to_op_sequence(&g, &ir, &lp).unwrap();
        assert!(s.ops.is_empty());
        assert_eq!(s.initial, vec![0, 1, 2]);
    }

    #[test]
    fn text_round_trip() {
        let mut s = OpSequence::new(2, vec![v(2, 2), e(1, 2)]);
        assert_eq!(s.to_text(), "2\nV 2 2\nE 1 2\n");
        assert_eq!(OpSequence::from_text(&s.to_text()).unwrap(), s);
        s.initial = vec![1, 0];
        assert_eq!(OpSequence::from_text(&s.to_text()).unwrap(), s);
        assert!(OpSequence::from_text("2\nX 1 2\n").is_err());
    }
}
