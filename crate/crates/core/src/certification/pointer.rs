//! Spanning-tree pointer scheme: edge labels proving that a vertex with a
//! given id exists in a connected edge set.
//!
//! Every edge carries the target id. Tree edges also carry the distance of
//! their upper endpoint and the id of their lower endpoint. Naming the child
//! matters: with distances alone, two adjacent vertices can both claim the
//! edge between them as their parent edge and close a rootless cycle.

use std::collections::{HashMap, VecDeque};

use crate::bits::{BitReader, BitWriter, DecodeError};
use crate::graph::{Graph, GraphError, VertexId};

use super::RejectReason;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TreeArc {
    /// Distance of the parent endpoint from the target.
    pub dist: u64,
    /// Id of the child endpoint.
    pub child: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PointerLabel {
    pub target: u64,
    pub arc: Option<TreeArc>,
}

pub fn encode_arc(w: &mut BitWriter, arc: Option<TreeArc>, width: u32) {
    w.bit(arc.is_some());
    if let Some(a) = arc {
        w.gamma(a.dist);
        w.bits(a.child, width);
    }
}

pub fn decode_arc(r: &mut BitReader<'_>, width: u32) -> Result<Option<TreeArc>, DecodeError> {
    if !r.bit()? {
        return Ok(None);
    }
    let dist = r.gamma()?;
    Ok(Some(TreeArc { dist, child: r.bits(width)? }))
}

impl PointerLabel {
    pub fn encode(&self, w: &mut BitWriter, width: u32) {
        w.bits(self.target, width);
        encode_arc(w, self.arc, width);
    }

    pub fn decode(r: &mut BitReader<'_>, width: u32) -> Result<Self, DecodeError> {
        let target = r.bits(width)?;
        Ok(PointerLabel { target, arc: decode_arc(r, width)? })
    }
}

/// BFS tree over `edges` rooted at `target`; arcs keyed by canonical edge.
/// Edges outside the target's component get no arc.
pub fn bfs_arcs(edges: &[(VertexId, VertexId)], target: VertexId) -> HashMap<(VertexId, VertexId), TreeArc> {
    let mut adj: HashMap<VertexId, Vec<VertexId>> = HashMap::new();
    for &(u, v) in edges {
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    }
    for list in adj.values_mut() {
        list.sort_unstable();
    }
    let mut dist = HashMap::from([(target, 0u64)]);
    let mut arcs = HashMap::new();
    let mut queue = VecDeque::from([target]);
    while let Some(x) = queue.pop_front() {
        let d = dist[&x];
        for &y in adj.get(&x).into_iter().flatten() {
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(y) {
                e.insert(d + 1);
                arcs.insert((x.min(y), x.max(y)), TreeArc { dist: d, child: y as u64 });
                queue.push_back(y);
            }
        }
    }
    arcs
}

/// Pointer labels for every edge of `g`, indexed like `g.edges()`.
pub fn pointer_labels(g: &Graph, target: VertexId) -> Result<Vec<PointerLabel>, GraphError> {
    if target >= g.n() {
        return Err(GraphError::OutOfRange { v: target, n: g.n() });
    }
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let arcs = bfs_arcs(g.edges(), target);
    Ok(g.edges().iter().map(|e| PointerLabel { target: target as u64, arc: arcs.get(e).copied() }).collect())
}

/// The local check at vertex `id` over the arcs of its incident edges in one
/// pointer instance.
pub fn check_arcs<'a>(id: u64, target: u64, arcs: impl IntoIterator<Item = &'a Option<TreeArc>>) -> Result<(), RejectReason> {
    let tree: Vec<&TreeArc> = arcs.into_iter().flatten().collect();
    let parents: Vec<&&TreeArc> = tree.iter().filter(|a| a.child == id).collect();
    let my_dist = if id == target {
        if !parents.is_empty() {
            return Err(RejectReason::PointerRootHasParent);
        }
        0
    } else {
        match parents.as_slice() {
            [p] => p.dist + 1,
            [] => return Err(RejectReason::PointerNoParent),
            _ => return Err(RejectReason::PointerManyParents),
        }
    };
    if tree.iter().filter(|a| a.child != id).any(|a| a.dist != my_dist) {
        return Err(RejectReason::PointerDistance);
    }
    Ok(())
}

/// Verification of the standalone scheme from a vertex's id and the pointer
/// labels on its incident edges.
pub fn verify_pointer(id: u64, labels: &[PointerLabel]) -> Result<(), RejectReason> {
    let Some(first) = labels.first() else {
        return Ok(());
    };
    if labels.iter().any(|l| l.target != first.target) {
        return Err(RejectReason::PointerTarget);
    }
    check_arcs(id, first.target, labels.iter().map(|l| &l.arc))
}
