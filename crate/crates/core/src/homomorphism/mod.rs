//! Homomorphism classes of k-lane fragments and their composition under
//! Bridge-merge and Parent-merge.
//!
//! A class pairs a property state with the fragment's terminal layout: its
//! lane set and, per lane, whether the in- and out-terminal coincide. The
//! boundary vertices are listed lane by lane, in-terminal first, then the
//! out-terminal when it differs.

mod brute;
mod state;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use brute::{brute_force_property, brute_force_property_with_limit, DEFAULT_BRUTE_LIMIT};
pub use state::{State, MAX_BOUNDARY};

use crate::bits::{BitReader, BitWriter, DecodeError};
use crate::graph::{Graph, VertexId};
use crate::lane_recursive::{HierarchicalDecomposition, KLaneGraph, Lane, LaneError, NodeKind};

/// Classes carry at most this many lanes, so a parent-merge never holds more
/// than `MAX_BOUNDARY` boundary vertices.
pub const MAX_LANES: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomError {
    #[error("classes belong to different properties")]
    PropertyMismatch,
    #[error("lane sets overlap")]
    LaneOverlap,
    #[error("lane {0} is missing from the class")]
    MissingLane(Lane),
    #[error("child lanes are not contained in parent lanes")]
    NotContained,
    #[error("terminals alias across lanes")]
    BadLayout,
    #[error("{0} lanes exceed the supported maximum")]
    TooManyLanes(usize),
    #[error("input tag {0} is not supported by the builtin properties")]
    UnsupportedTag(u8),
    #[error("graph with {n} vertices exceeds brute-force limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("class encoding is not canonical")]
    NonCanonical,
    #[error("unknown property {0:?}")]
    UnknownProperty(String),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Lane(#[from] LaneError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    Bipartite,
    Acyclic,
    PerfectMatching,
    EvenOrder,
}

impl Property {
    pub const ALL: [Property; 4] = [Property::Bipartite, Property::Acyclic, Property::PerfectMatching, Property::EvenOrder];

    pub fn name(self) -> &'static str {
        match self {
            Property::Bipartite => "bipartite",
            Property::Acyclic => "acyclic",
            Property::PerfectMatching => "perfect-matching",
            Property::EvenOrder => "even-order",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = HomError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Property::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| HomError::UnknownProperty(s.to_string()))
    }
}

/// A property, optionally restricted to a marked edge subset of the host.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Plugin {
    pub property: Property,
    pub marked: bool,
}

impl Plugin {
    pub fn name(&self) -> String {
        if self.marked {
            format!("marked-{}", self.property)
        } else {
            self.property.to_string()
        }
    }
}

impl FromStr for Plugin {
    type Err = HomError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.strip_prefix("marked-") {
            Some(rest) => Ok(Plugin { property: rest.parse()?, marked: true }),
            None => Ok(Plugin { property: s.parse()?, marked: false }),
        }
    }
}

pub fn builtin_plugins() -> Vec<Plugin> {
    [false, true].into_iter().flat_map(|marked| Property::ALL.map(|property| Plugin { property, marked })).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomClass {
    lanes: Vec<Lane>,
    same: Vec<bool>,
    state: State,
}

impl HomClass {
    pub fn lanes(&self) -> &[Lane] {
        &self.lanes
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn property(&self) -> Property {
        self.state.property()
    }

    /// Whether lane `l`'s in- and out-terminal coincide.
    pub fn same(&self, l: Lane) -> Option<bool> {
        self.lanes.binary_search(&l).ok().map(|i| self.same[i])
    }

    pub fn boundary_len(&self) -> usize {
        self.lanes.len() + self.same.iter().filter(|s| !**s).count()
    }

    /// Boundary positions of lane `l`'s in- and out-terminal.
    fn slots(&self, l: Lane) -> Option<(usize, usize)> {
        let i = self.lanes.binary_search(&l).ok()?;
        let start = i + self.same[..i].iter().filter(|s| !**s).count();
        Some((start, if self.same[i] { start } else { start + 1 }))
    }

    pub fn accepts(&self) -> bool {
        self.state.accepts(self.boundary_len())
    }

    /// Class of a fragment computed directly from its vertices and edges.
    pub fn of_fragment(p: Property, frag: &KLaneGraph, marked: &dyn Fn(VertexId, VertexId) -> bool) -> Result<Self, HomError> {
        if frag.terminals.len() > MAX_LANES {
            return Err(HomError::TooManyLanes(frag.terminals.len()));
        }
        if frag.vertices.len() > MAX_BOUNDARY {
            return Err(HomError::TooLarge { n: frag.vertices.len(), limit: MAX_BOUNDARY });
        }
        let index: BTreeMap<VertexId, usize> = frag.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut s = State::empty(p);
        for i in 0..index.len() {
            s = s.union(i, &State::vertex(p));
        }
        for &(u, v) in &frag.edges {
            s.add_edge(index[&u], index[&v], marked(u, v));
        }
        let mut keep = Vec::new();
        let mut same = Vec::new();
        for &(tin, tout) in frag.terminals.values() {
            keep.push(*index.get(&tin).ok_or(HomError::BadLayout)?);
            if tin != tout {
                keep.push(*index.get(&tout).ok_or(HomError::BadLayout)?);
            }
            same.push(tin == tout);
        }
        if keep.iter().collect::<BTreeSet<_>>().len() != keep.len() {
            return Err(HomError::BadLayout);
        }
        Ok(HomClass { lanes: frag.terminals.keys().copied().collect(), same, state: s.project(index.len(), &keep) })
    }

    /// Writes the lane set as a `k`-bit mask, the per-lane coincidence bits, then the state.
    pub fn encode(&self, w: &mut BitWriter, k: usize) {
        for l in 1..=k {
            w.bit(self.lanes.binary_search(&l).is_ok());
        }
        self.encode_without_lanes(w);
    }

    /// The encoding minus the lane mask, for readers that know the lane set.
    pub fn encode_without_lanes(&self, w: &mut BitWriter) {
        for &s in &self.same {
            w.bit(s);
        }
        let n = self.boundary_len();
        match &self.state {
            State::Bipartite(s) => {
                w.bit(s.is_some());
                if let Some(s) = s {
                    let reps: Vec<usize> = s.iter().map(|e| e.0).collect();
                    write_blocks(w, &reps, |w, i| w.bit(s[i].1));
                }
            }
            State::Acyclic(s) => {
                w.bit(s.is_some());
                if let Some(s) = s {
                    write_blocks(w, s, |_, _| {});
                }
            }
            State::Matching(s) => {
                w.gamma(s.len() as u64);
                for &m in s {
                    write_wide(w, m, n);
                }
            }
            State::Parity(p) => w.bit(*p),
        }
    }

    pub fn decode(r: &mut BitReader<'_>, p: Property, k: usize) -> Result<Self, HomError> {
        if k > MAX_LANES {
            return Err(HomError::TooManyLanes(k));
        }
        let mut lanes = Vec::new();
        for l in 1..=k {
            if r.bit()? {
                lanes.push(l);
            }
        }
        Self::decode_with_lanes(r, p, lanes)
    }

    pub fn decode_with_lanes(r: &mut BitReader<'_>, p: Property, lanes: Vec<Lane>) -> Result<Self, HomError> {
        if lanes.is_empty() || lanes.len() > MAX_LANES || lanes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HomError::NonCanonical);
        }
        let same = lanes.iter().map(|_| r.bit()).collect::<Result<Vec<_>, _>>()?;
        let n = lanes.len() + same.iter().filter(|s| !**s).count();
        let state = match p {
            Property::Bipartite => State::Bipartite(if r.bit()? {
                let mut parity = vec![false; n];
                let reps = read_blocks(r, n, |r, i| {
                    parity[i] = r.bit()?;
                    Ok(())
                })?;
                Some(reps.into_iter().zip(parity).collect())
            } else {
                None
            }),
            Property::Acyclic => State::Acyclic(if r.bit()? { Some(read_blocks(r, n, |_, _| Ok(()))?) } else { None }),
            Property::PerfectMatching => {
                let count = r.gamma()?;
                if count > (r.remaining() / n.max(1)).max(1) as u64 {
                    return Err(HomError::Decode(DecodeError::Eof(r.position())));
                }
                State::Matching((0..count).map(|_| read_wide(r, n)).collect::<Result<Vec<_>, _>>()?)
            }
            Property::EvenOrder => State::Parity(r.bit()?),
        };
        if !state.is_canonical(n) {
            return Err(HomError::NonCanonical);
        }
        Ok(HomClass { lanes, same, state })
    }

    pub fn encoded_len(&self, k: usize) -> usize {
        let mut w = BitWriter::new();
        self.encode(&mut w, k);
        w.len()
    }
}

fn index_bits(count: usize) -> u32 {
    if count <= 1 {
        0
    } else {
        usize::BITS - (count - 1).leading_zeros()
    }
}

/// A canonical block assignment (each entry names the first index of its
/// block) as a restricted-growth string: per entry after the first, one bit
/// for "opens a block", else the block's index among open blocks followed by
/// whatever `extra` writes for a joining entry.
fn write_blocks(w: &mut BitWriter, reps: &[usize], mut extra: impl FnMut(&mut BitWriter, usize)) {
    let mut firsts = vec![0];
    for (i, &rep) in reps.iter().enumerate().skip(1) {
        if rep == i {
            w.bit(true);
            firsts.push(i);
        } else {
            w.bit(false);
            let idx = firsts.iter().position(|&f| f == rep).expect("canonical reps");
            w.bits(idx as u64, index_bits(firsts.len()));
            extra(w, i);
        }
    }
}

fn read_blocks(
    r: &mut BitReader<'_>,
    n: usize,
    mut extra: impl FnMut(&mut BitReader<'_>, usize) -> Result<(), DecodeError>,
) -> Result<Vec<usize>, HomError> {
    let mut reps = Vec::with_capacity(n);
    let mut firsts = Vec::new();
    for i in 0..n {
        if i == 0 || r.bit()? {
            firsts.push(i);
            reps.push(i);
        } else {
            let idx = r.bits(index_bits(firsts.len()))? as usize;
            reps.push(*firsts.get(idx).ok_or(HomError::NonCanonical)?);
            extra(r, i)?;
        }
    }
    Ok(reps)
}

fn write_wide(w: &mut BitWriter, m: u128, n: usize) {
    if n > 64 {
        w.bits((m >> 64) as u64, (n - 64) as u32);
        w.bits(m as u64, 64);
    } else {
        w.bits(m as u64, n as u32);
    }
}

fn read_wide(r: &mut BitReader<'_>, n: usize) -> Result<u128, DecodeError> {
    if n > 64 {
        let hi = r.bits((n - 64) as u32)? as u128;
        Ok(hi << 64 | r.bits(64)? as u128)
    } else {
        Ok(r.bits(n as u32)? as u128)
    }
}

/// Class of `Bridge-merge(g1, g2, i, j)`; `marked` says whether the new edge counts.
pub fn compose_bridge(c1: &HomClass, c2: &HomClass, i: Lane, j: Lane, marked: bool) -> Result<HomClass, HomError> {
    if c1.property() != c2.property() {
        return Err(HomError::PropertyMismatch);
    }
    if c1.lanes.iter().any(|l| c2.lanes.binary_search(l).is_ok()) {
        return Err(HomError::LaneOverlap);
    }
    let (_, oi) = c1.slots(i).ok_or(HomError::MissingLane(i))?;
    let (_, oj) = c2.slots(j).ok_or(HomError::MissingLane(j))?;
    let n1 = c1.boundary_len();
    let n = n1 + c2.boundary_len();
    let mut s = c1.state.union(n1, &c2.state);
    s.add_edge(oi, n1 + oj, marked);
    let mut lanes: Vec<Lane> = c1.lanes.iter().chain(&c2.lanes).copied().collect();
    lanes.sort_unstable();
    let mut keep = Vec::new();
    let mut same = Vec::new();
    for &l in &lanes {
        let (a, b, off, sm) = match c1.slots(l) {
            Some((a, b)) => (a, b, 0, c1.same(l)),
            None => {
                let (a, b) = c2.slots(l).expect("lane from one side");
                (a, b, n1, c2.same(l))
            }
        };
        keep.push(off + a);
        if a != b {
            keep.push(off + b);
        }
        same.push(sm.expect("lane present"));
    }
    Ok(HomClass { lanes, same, state: s.project(n, &keep) })
}

/// Class of `Parent-merge(child, parent)`: each child in-terminal is glued to
/// the parent's out-terminal on the same lane.
pub fn compose_parent(child: &HomClass, parent: &HomClass) -> Result<HomClass, HomError> {
    if child.property() != parent.property() {
        return Err(HomError::PropertyMismatch);
    }
    if child.lanes.iter().any(|l| parent.lanes.binary_search(l).is_err()) {
        return Err(HomError::NotContained);
    }
    let np = parent.boundary_len();
    let mut n = np + child.boundary_len();
    let mut s = parent.state.union(np, &child.state);
    let mut cur: Vec<usize> = (0..n).collect();
    for &l in &child.lanes {
        let (_, po) = parent.slots(l).expect("contained");
        let (ci, _) = child.slots(l).expect("own lane");
        let (u, v) = (cur[po], cur[np + ci]);
        s.identify(u, v);
        n -= 1;
        let u = if u > v { u - 1 } else { u };
        for c in cur.iter_mut() {
            if *c == v {
                *c = u;
            } else if *c > v {
                *c -= 1;
            }
        }
    }
    let mut keep = Vec::new();
    let mut same = Vec::new();
    for &l in &parent.lanes {
        let (pi, po) = parent.slots(l).expect("own lane");
        let tin = cur[pi];
        let tout = match child.slots(l) {
            Some((_, co)) => cur[np + co],
            None => cur[po],
        };
        keep.push(tin);
        if tin != tout {
            keep.push(tout);
        }
        same.push(tin == tout);
    }
    if keep.iter().collect::<BTreeSet<_>>().len() != keep.len() {
        return Err(HomError::BadLayout);
    }
    Ok(HomClass { lanes: parent.lanes.clone(), same, state: s.project(n, &keep) })
}

/// Folds a merge tree of classes by contracting tree edges in the given order
/// of child members. Every order yields the same class.
pub fn fold_tree_in_order(classes: &[HomClass], parent: &[Option<usize>], order: &[usize]) -> Result<HomClass, HomError> {
    let mut acc: Vec<Option<HomClass>> = classes.iter().cloned().map(Some).collect();
    let mut absorbed: Vec<usize> = (0..classes.len()).collect();
    fn find(absorbed: &mut [usize], mut x: usize) -> usize {
        while absorbed[x] != x {
            absorbed[x] = absorbed[absorbed[x]];
            x = absorbed[x];
        }
        x
    }
    for &c in order {
        let p = parent.get(c).copied().flatten().ok_or(HomError::BadLayout)?;
        let (rc, rp) = (find(&mut absorbed, c), find(&mut absorbed, p));
        if rc == rp {
            return Err(HomError::BadLayout);
        }
        let child = acc[rc].take().ok_or(HomError::BadLayout)?;
        let merged = compose_parent(&child, acc[rp].as_ref().ok_or(HomError::BadLayout)?)?;
        acc[rp] = Some(merged);
        absorbed[rc] = rp;
    }
    let roots: Vec<usize> = (0..classes.len()).filter(|&x| absorbed[x] == x).collect();
    match roots.as_slice() {
        [r] => acc[*r].take().ok_or(HomError::BadLayout),
        _ => Err(HomError::BadLayout),
    }
}

/// Per-node classes of a decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub plugin: Plugin,
    /// Class of each node's own fragment; `None` for detached arena slots.
    pub node: Vec<Option<HomClass>>,
    /// For a T-node member, the class of its merge subtree.
    pub subtree: Vec<Option<HomClass>>,
    pub root: HomClass,
    pub accepted: bool,
}

/// Bottom-up evaluation over a decomposition. For a marked plugin, an edge
/// counts iff `host` has it; otherwise `host` only supplies input tags.
pub fn eval_property(h: &HierarchicalDecomposition, plugin: Plugin, host: &Graph) -> Result<Evaluation, HomError> {
    if let Some(t) = (0..host.n()).map(|v| host.vertex_input(v)).chain((0..host.m()).map(|e| host.edge_input(e))).find(|&t| t != 0) {
        return Err(HomError::UnsupportedTag(t));
    }
    let marked = |u: VertexId, v: VertexId| !plugin.marked || host.has_edge(u, v);
    let p = plugin.property;
    let mut order = Vec::new();
    let mut stack = vec![h.root];
    while let Some(x) = stack.pop() {
        order.push(x);
        stack.extend(h.nodes[x].children.iter().copied());
    }
    let mut node: Vec<Option<HomClass>> = vec![None; h.nodes.len()];
    let mut subtree: Vec<Option<HomClass>> = vec![None; h.nodes.len()];
    for &x in order.iter().rev() {
        let nd = &h.nodes[x];
        let class = match nd.kind {
            NodeKind::V | NodeKind::E | NodeKind::P => HomClass::of_fragment(p, &nd.fragment, &marked)?,
            NodeKind::B { i, j } => {
                let (l, r) = (nd.children[0], nd.children[1]);
                let bridge = h.own_edges(x)[0];
                compose_bridge(node[l].as_ref().expect("child done"), node[r].as_ref().expect("child done"), i, j, marked(bridge.0, bridge.1))?
            }
            NodeKind::T => {
                for &m in nd.children.iter().rev() {
                    let mut acc = node[m].clone().expect("member done");
                    for c in h.tree_children(m) {
                        acc = compose_parent(subtree[c].as_ref().expect("subtree done"), &acc)?;
                    }
                    subtree[m] = Some(acc);
                }
                subtree[nd.children[0]].clone().expect("tree root done")
            }
        };
        node[x] = Some(class);
    }
    let root = node[h.root].clone().expect("root done");
    let accepted = root.accepts();
    Ok(Evaluation { plugin, node, subtree, root, accepted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{BitReader, BitString};
    use crate::lane_recursive::{bridge_merge, build_hierarchical_decomposition, parent_merge, apply_op_sequence, Op, OpSequence};

    fn all(_: VertexId, _: VertexId) -> bool {
        true
    }

    fn cycle_ops(n: usize) -> OpSequence {
        // Lane 1 walks n-2 fresh vertices, then closes onto lane 2.
        let mut ops: Vec<Op> = (2..n).map(|v| Op::VInsert { lane: 1, vertex: v }).collect();
        ops.push(Op::EInsert { a: 1, b: 2 });
        OpSequence::new(2, ops)
    }

    fn evaluate(s: &OpSequence, p: Property) -> bool {
        let h = build_hierarchical_decomposition(s).unwrap();
        let g = apply_op_sequence(s).unwrap().graph;
        eval_property(&h, Plugin { property: p, marked: false }, &g).unwrap().accepted
    }

    #[test]
    fn cycles_and_paths() {
        assert!(evaluate(&cycle_ops(6), Property::Bipartite));
        assert!(!evaluate(&cycle_ops(5), Property::Bipartite));
        assert!(!evaluate(&cycle_ops(6), Property::Acyclic));
        let p4 = OpSequence::new(1, (1..4).map(|v| Op::VInsert { lane: 1, vertex: v }).collect());
        let p3 = OpSequence::new(1, (1..3).map(|v| Op::VInsert { lane: 1, vertex: v }).collect());
        assert!(evaluate(&p4, Property::PerfectMatching));
        assert!(!evaluate(&p3, Property::PerfectMatching));
        assert!(evaluate(&p3, Property::Acyclic));
        assert!(!evaluate(&p3, Property::EvenOrder));
    }

    #[test]
    fn edge_class_has_opposite_endpoints() {
        let c = HomClass::of_fragment(Property::Bipartite, &KLaneGraph::edge(1, 4, 9), &all).unwrap();
        assert_eq!(c.state, State::Bipartite(Some(vec![(0, false), (0, true)])));
        assert_eq!(c.same(1), Some(false));
    }

    #[test]
    fn three_path_matching_class() {
        let c = HomClass::of_fragment(Property::PerfectMatching, &KLaneGraph::path(&[0, 1, 2]), &all).unwrap();
        assert_eq!(c.state, State::Matching(vec![0b000, 0b011, 0b110]));
        assert!(!c.accepts());
    }

    #[test]
    fn composition_matches_direct_class() {
        let a = KLaneGraph::edge(1, 0, 3);
        let b = KLaneGraph::edge(2, 1, 4);
        let bridged = bridge_merge(&a, &b, 1, 2).unwrap();
        let pm = parent_merge(&bridged, &KLaneGraph::path(&[0, 1, 2])).unwrap();
        for p in Property::ALL {
            let ca = HomClass::of_fragment(p, &a, &all).unwrap();
            let cb = HomClass::of_fragment(p, &b, &all).unwrap();
            let cbr = compose_bridge(&ca, &cb, 1, 2, true).unwrap();
            assert_eq!(cbr, HomClass::of_fragment(p, &bridged, &all).unwrap(), "{p}");
            let cp = HomClass::of_fragment(p, &KLaneGraph::path(&[0, 1, 2]), &all).unwrap();
            assert_eq!(compose_parent(&cbr, &cp).unwrap(), HomClass::of_fragment(p, &pm, &all).unwrap(), "{p}");
        }
    }

    #[test]
    fn unmarked_bridge_is_ignored() {
        let a = HomClass::of_fragment(Property::Acyclic, &KLaneGraph::vertex(1, 0), &all).unwrap();
        let b = HomClass::of_fragment(Property::Acyclic, &KLaneGraph::vertex(2, 1), &all).unwrap();
        let joined = compose_bridge(&a, &b, 1, 2, true).unwrap();
        let apart = compose_bridge(&a, &b, 1, 2, false).unwrap();
        assert_eq!(joined.state, State::Acyclic(Some(vec![0, 0])));
        assert_eq!(apart.state, State::Acyclic(Some(vec![0, 1])));
    }

    #[test]
    fn composition_errors() {
        let a = HomClass::of_fragment(Property::Bipartite, &KLaneGraph::vertex(1, 0), &all).unwrap();
        let b = HomClass::of_fragment(Property::Acyclic, &KLaneGraph::vertex(2, 1), &all).unwrap();
        assert_eq!(compose_bridge(&a, &b, 1, 2, true), Err(HomError::PropertyMismatch));
        assert_eq!(compose_bridge(&a, &a, 1, 1, true), Err(HomError::LaneOverlap));
        let c = HomClass::of_fragment(Property::Bipartite, &KLaneGraph::vertex(2, 1), &all).unwrap();
        assert_eq!(compose_bridge(&a, &c, 1, 3, true), Err(HomError::MissingLane(3)));
        assert_eq!(compose_parent(&c, &a), Err(HomError::NotContained));
    }

    #[test]
    fn encoding_round_trips() {
        let s = OpSequence::new(3, vec![Op::VInsert { lane: 2, vertex: 3 }, Op::EInsert { a: 1, b: 2 }, Op::VInsert { lane: 3, vertex: 4 }]);
        let h = build_hierarchical_decomposition(&s).unwrap();
        let g = apply_op_sequence(&s).unwrap().graph;
        for plugin in builtin_plugins() {
            let ev = eval_property(&h, plugin, &g).unwrap();
            for c in ev.node.iter().chain(&ev.subtree).flatten() {
                let mut w = BitWriter::new();
                c.encode(&mut w, 3);
                let bits = w.finish();
                let mut r = BitReader::new(&bits);
                assert_eq!(&HomClass::decode(&mut r, plugin.property, 3).unwrap(), c);
                assert!(r.is_at_end());
            }
        }
    }

    #[test]
    fn decode_rejects_non_canonical() {
        // No lanes at all.
        let bits = BitString::from_bits([false, false, true]);
        assert_eq!(HomClass::decode(&mut BitReader::new(&bits), Property::Bipartite, 2), Err(HomError::NonCanonical));
        // Four boundary vertices; the last joins block 3 while only three are open.
        let mut w = BitWriter::new();
        w.bits(0b11, 2);
        w.bits(0b00, 2);
        w.bit(true);
        w.bit(true);
        w.bit(true);
        w.bit(false);
        w.bits(3, 2);
        w.bit(false);
        let bits = w.finish();
        assert_eq!(HomClass::decode(&mut BitReader::new(&bits), Property::Bipartite, 2), Err(HomError::NonCanonical));
        // Matching families must be sorted.
        let mut w = BitWriter::new();
        w.bits(0b10, 2);
        w.bit(true);
        w.gamma(2);
        w.bit(true);
        w.bit(false);
        let bits = w.finish();
        assert_eq!(HomClass::decode(&mut BitReader::new(&bits), Property::PerfectMatching, 2), Err(HomError::NonCanonical));
    }

    #[test]
    fn plugin_names_round_trip() {
        for p in builtin_plugins() {
            assert_eq!(p.name().parse::<Plugin>().unwrap(), p);
        }
        assert!("hamiltonian".parse::<Plugin>().is_err());
    }

    #[test]
    fn tags_are_rejected() {
        let s = OpSequence::new(2, vec![]);
        let h = build_hierarchical_decomposition(&s).unwrap();
        let g = apply_op_sequence(&s).unwrap().graph.with_vertex_input(0, 3).unwrap();
        assert_eq!(eval_property(&h, builtin_plugins()[0], &g).unwrap_err(), HomError::UnsupportedTag(3));
    }
}
